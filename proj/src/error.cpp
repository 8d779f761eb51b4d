#include "qbound/error.hpp"

namespace qb {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::ParseError: return "ParseError";
        case Errc::EmptyAfterCleaning: return "EmptyAfterCleaning";
        case Errc::InsufficientData: return "InsufficientData";
        case Errc::TooFewStrikes: return "TooFewStrikes";
        case Errc::NonconvergentImpliedVol: return "NonconvergentImpliedVol";
        case Errc::BracketingError: return "BracketingError";
        case Errc::MixedHorizon: return "MixedHorizon";
        case Errc::DegenerateDesign: return "DegenerateDesign";
        case Errc::NonConvergence: return "NonConvergence";
        case Errc::AlignmentError: return "AlignmentError";
        case Errc::WindowTooLong: return "WindowTooLong";
        case Errc::SingularCovariance: return "SingularCovariance";
        case Errc::GridMismatch: return "GridMismatch";
        case Errc::ZeroVariance: return "ZeroVariance";
        case Errc::TooFewObservations: return "TooFewObservations";
        case Errc::InsufficientBootstrap: return "InsufficientBootstrap";
        case Errc::InvalidExponent: return "InvalidExponent";
        case Errc::DenominatorNonpositive: return "DenominatorNonpositive";
        case Errc::StepOutOfRange: return "StepOutOfRange";
        case Errc::NoRoot: return "NoRoot";
        case Errc::UnsupportedUtility: return "UnsupportedUtility";
        case Errc::OutOfSupport: return "OutOfSupport";
        case Errc::MomentUndefined: return "MomentUndefined";
        case Errc::DivergentTilt: return "DivergentTilt";
        case Errc::ReplicateFailure: return "ReplicateFailure";
    }
    return "Unknown";
}

bool is_input_error(Errc c) {
    switch (c) {
        case Errc::DegenerateDesign:
        case Errc::NonConvergence:
        case Errc::SingularCovariance:
        case Errc::DenominatorNonpositive:
        case Errc::NoRoot:
        case Errc::DivergentTilt:
        case Errc::NonconvergentImpliedVol:
        case Errc::MomentUndefined:
        case Errc::ReplicateFailure:
        case Errc::ZeroVariance:
            return false;
        default:
            return true;
    }
}

Error::Error(Errc code, const std::string& msg)
    : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

}  // namespace qb
