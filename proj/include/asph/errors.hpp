#ifndef ASPH_ERRORS_HPP
#define ASPH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace asph
{

struct NonPositiveLength : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::domain_error
{
    using std::domain_error::domain_error;
};

struct SingularSystem : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct AnisotropicKernelUnsupported : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct EmptyDomain : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct ZeroReference : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct NonPositiveMass : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct UnknownScenario : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct MalformedConfig : std::invalid_argument
{
    using std::invalid_argument::invalid_argument;
};

struct IoFailure : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

} // namespace asph

#endif
