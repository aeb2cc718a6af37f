#pragma once

#include "reglab/errors.hpp"

namespace reglab {

enum class Route { QSeries, Continued, DirectSum, Auto };

inline const char* route_name(Route r) {
    switch (r) {
        case Route::QSeries: return "qseries";
        case Route::Continued: return "continued";
        case Route::DirectSum: return "direct";
        default: return "auto";
    }
}

struct EvalSettings {
    double tol = 1e-12;          // target absolute accuracy
    int max_q_terms = 400;       // cap on q-series terms per direction
    double shell_radius = 1500;  // direct-sum cutoff
    Route route = Route::Auto;

    void validate() const {
        if (!(tol >= 1e-14 && tol <= 1e-2))
            throw BadConfig("tol must lie in [1e-14, 1e-2]");
        if (max_q_terms < 8) throw BadConfig("max_q_terms must be >= 8");
        if (!(shell_radius >= 10)) throw BadConfig("shell_radius must be >= 10");
    }
};

} // namespace reglab
