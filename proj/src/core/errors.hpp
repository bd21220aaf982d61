#pragma once
#include <stdexcept>
#include <string>

namespace dbvn {

// Error codes shared with the C API (include/dbvn/dbvn.h keeps the same order).
enum class Status : int {
    ok = 0,
    dimension_error,
    negative_entry,
    stochasticity_error,
    decomposition_stall,
    frame_too_small,
    invalid_params,
    degenerate_params,
    no_convergence,
    negative_result,
    quadrature_failure,
    unstable_regime,
    target_unreachable,
    config_error,
    not_bracketed,
    io_error,
    internal_error,
};

const char* status_name(Status s);

class Error : public std::runtime_error {
public:
    Error(Status code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Status code() const { return code_; }

private:
    Status code_;
};

[[noreturn]] inline void fail(Status code, const std::string& what) {
    throw Error(code, what);
}

} // namespace dbvn
