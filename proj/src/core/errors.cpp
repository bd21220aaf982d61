#include "errors.hpp"

namespace dbvn {

const char* status_name(Status s) {
    switch (s) {
        case Status::ok: return "ok";
        case Status::dimension_error: return "dimension_error";
        case Status::negative_entry: return "negative_entry";
        case Status::stochasticity_error: return "stochasticity_error";
        case Status::decomposition_stall: return "decomposition_stall";
        case Status::frame_too_small: return "frame_too_small";
        case Status::invalid_params: return "invalid_params";
        case Status::degenerate_params: return "degenerate_params";
        case Status::no_convergence: return "no_convergence";
        case Status::negative_result: return "negative_result";
        case Status::quadrature_failure: return "quadrature_failure";
        case Status::unstable_regime: return "unstable_regime";
        case Status::target_unreachable: return "target_unreachable";
        case Status::config_error: return "config_error";
        case Status::not_bracketed: return "not_bracketed";
        case Status::io_error: return "io_error";
        case Status::internal_error: return "internal_error";
    }
    return "unknown";
}

} // namespace dbvn
