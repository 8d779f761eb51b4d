#pragma once

#include <stdexcept>
#include <string>

namespace qb {

enum class Errc {
    InvalidArgument,
    ParseError,
    EmptyAfterCleaning,
    InsufficientData,
    TooFewStrikes,
    NonconvergentImpliedVol,
    BracketingError,
    MixedHorizon,
    DegenerateDesign,
    NonConvergence,
    AlignmentError,
    WindowTooLong,
    SingularCovariance,
    GridMismatch,
    ZeroVariance,
    TooFewObservations,
    InsufficientBootstrap,
    InvalidExponent,
    DenominatorNonpositive,
    StepOutOfRange,
    NoRoot,
    UnsupportedUtility,
    OutOfSupport,
    MomentUndefined,
    DivergentTilt,
    ReplicateFailure,
};

const char* errc_name(Errc c);

// True for errors caused by bad inputs or configuration, false for numerical failures.
bool is_input_error(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace qb
