#pragma once

#include <vector>

#include "platsim/model.hpp"

namespace platsim {

/// One analysis-dataset row: week-6 outcome, baseline covariate, group indicator
/// (0 control, 1 treatment), and the randomization period.
struct AnalysisRow {
    double week6 = 0.0;
    double baseline = 0.0;
    int group = 0;
    long period_id = 0;
};

struct AncovaFit {
    double beta = 0.0;  // treatment coefficient (MADRS points; negative favors treatment)
    double se = 0.0;
    double t = 0.0;
    long df = 0;
    double p_one_sided = 0.0;  // P(T <= t); small values favor treatment
    std::vector<long> dropped_period_levels;
};

/// Least-squares fit of week6 ~ intercept + group + baseline (+ period indicators,
/// earliest level as reference) via Householder QR. Collinear period columns are
/// detected by a column-norm-pivoted rank check (relative tolerance 1e-10) and
/// dropped; a rank-deficient intercept/group/baseline core raises AnalysisError.
AncovaFit fit_ancova(const std::vector<AnalysisRow>& rows, CovariateSet covariates);

/// Futility rule: stop on strict exceedance of the boundary.
inline bool interim_stops(const AncovaFit& fit, double futility_boundary) {
    return fit.p_one_sided > futility_boundary;
}

/// Efficacy rule: success on p <= alpha.
inline bool final_succeeds(const AncovaFit& fit, double alpha) {
    return fit.p_one_sided <= alpha;
}

}  // namespace platsim
