#pragma once

#include <stdexcept>
#include <string>

namespace reglab {

// Every failure mode carries a stable stage name so reports and exit paths
// can surface machine-readable errors.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

#define REGLAB_ERROR_TYPE(NAME)                                         \
    class NAME : public Error {                                         \
    public:                                                             \
        explicit NAME(const std::string& what) : Error(#NAME, what) {}  \
    }

REGLAB_ERROR_TYPE(DegenerateLattice);
REGLAB_ERROR_TYPE(NotUnimodular);
REGLAB_ERROR_TYPE(NotAnIsogeny);
REGLAB_ERROR_TYPE(NomeOutOfRange);
REGLAB_ERROR_TYPE(ConvergenceRegion);
REGLAB_ERROR_TYPE(PoleEncountered);
REGLAB_ERROR_TYPE(SingularEntry);
REGLAB_ERROR_TYPE(NonInvertibleMultiplier);
REGLAB_ERROR_TYPE(NotASubgroup);
REGLAB_ERROR_TYPE(ZeroModulus);
REGLAB_ERROR_TYPE(NotCoprime);
REGLAB_ERROR_TYPE(MissingGammaData);
REGLAB_ERROR_TYPE(SingularR);
REGLAB_ERROR_TYPE(BadConfig);

#undef REGLAB_ERROR_TYPE

} // namespace reglab
