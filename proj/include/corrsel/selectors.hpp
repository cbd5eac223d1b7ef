#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "corrsel/types.hpp"

namespace corrsel {

enum class ModelKind { Homography, Fundamental };

// ---------------------------------------------------------------------------
// Parameter blocks. Defaults are the evaluation settings the selectors were
// tuned against; every field can be overridden per run.

struct NnsrParams {
  // Fixed ratio threshold; unset means derive one from the quality histogram.
  std::optional<double> t_nnsr;
};

struct RansacParams {
  double t_ransac = 10.0;    // inlier residual threshold, pixels
  int n_ransac = 2000;       // hypothesis budget
  double confidence = 0.99;  // early-exit target
  ModelKind model_kind = ModelKind::Homography;
};

struct StParams {
  double t_st = 0.3;  // affinities at or below this count as conflicts
};

struct GtmParams {
  double lambda_gtm = 1e-4;       // payoff decay
  int n_gtm = 100;                // replicator iterations
  std::optional<double> t_gtm;    // fixed mass threshold; unset -> histogram split
};

struct UsacParams {
  int n_usac = 850000;       // hypothesis cap
  double t_h = 10.0;         // homography residual threshold, pixels
  double t_f = 1.5;          // epipolar residual threshold, pixels
  double confidence = 0.99;
  ModelKind model_kind = ModelKind::Homography;
  // Sequential-test plumbing.
  double sprt_eps0 = 0.2;    // initial inlier-rate estimate under a good model
  double sprt_delta0 = 0.05; // initial consistency rate under a bad model
  int lo_inner_rounds = 10;  // refit rounds after a new best model
};

struct VfcParams {
  double beta = 0.1;        // kernel bandwidth (squared-distance Gaussian)
  double lambda_vfc = 3.0;  // smoothness weight
  double t_vfc = 0.75;      // posterior acceptance threshold
  double gamma0 = 0.9;      // initial inlier fraction
  int max_em_iters = 500;
  double tol = 1e-5;
  // Above this many inputs the field is spanned from a strided subset of the
  // sample points instead of all of them; the N x N solve does not scale.
  int max_basis = 600;
};

struct GmsParams {
  double alpha = 4.0;  // acceptance factor on sqrt(mean cell population)
  int grid = 20;       // cells per image side
};

struct LpmParams {
  double lambda_lpm = 6.0;  // cost acceptance threshold
  int k = 4;                // neighborhood size
  bool normalize_coords = true;
};

// ---------------------------------------------------------------------------
// Selectors. Each is a pure function of (set, params, seed); only the
// sampling-based selectors consume the seed.

// Keeps matches whose quality (distance ratio) falls at or below the
// threshold. With no fixed threshold the split point comes from
// otsu_threshold over all qualities; an unsplittable histogram selects
// everything and flags it.
SelectionResult select_nnsr(const CorrespondenceSet& set, const NnsrParams& params);

// Hypothesize-and-verify consensus maximization over minimal samples.
SelectionResult select_ransac(const CorrespondenceSet& set, const RansacParams& params,
                              std::uint64_t seed);

// Pairwise length-ratio affinity, principal-eigenvector scoring, greedy
// conflict pruning.
SelectionResult select_st(const CorrespondenceSet& set, const StParams& params);

// Replicator dynamics on a local-frame coherence payoff matrix.
SelectionResult select_gtm(const CorrespondenceSet& set, const GtmParams& params);

// Quality-ordered progressive sampling with sequential hypothesis rejection
// and local optimization of new best models.
SelectionResult select_usac(const CorrespondenceSet& set, const UsacParams& params,
                            std::uint64_t seed);

// EM fit of a smooth displacement field with a uniform outlier component;
// selects by posterior.
SelectionResult select_vfc(const CorrespondenceSet& set, const VfcParams& params);

// Grid-cell motion statistics: accepts cell pairs whose support clears a
// threshold derived from the local match density.
SelectionResult select_gms(const CorrespondenceSet& set, const GmsParams& params);

// Neighborhood-consistency cost with a fixed acceptance threshold.
SelectionResult select_lpm(const CorrespondenceSet& set, const LpmParams& params);

// ---------------------------------------------------------------------------
// Exposed building blocks; the selectors are thin drivers over these and the
// tests exercise them directly.

// Length-ratio affinity min(d1/d2, d2/d1) in [0, 1]; zero when either pair of
// keypoints coincides and on the diagonal.
Eigen::MatrixXd st_affinity(const CorrespondenceSet& set);

// exp(-lambda * max(L1 cross-mapping displacement)) for two matches with
// local frames T_i(x) = q_i + A_i (x - p_i).
double gtm_payoff(const Correspondence& ci, const Correspondence& cj, double lambda);

// Binomial separation statistics for cell-group support: inlier and outlier
// support distributions B(K*n, p) and the normalized score
// (m_t - m_f) / (s_t + s_f).
struct GmsStatModel {
  double p_true = 0.0;
  double p_false = 0.0;
  double mean_true = 0.0;
  double mean_false = 0.0;
  double sd_true = 0.0;
  double sd_false = 0.0;
  double score = 0.0;
};
GmsStatModel gms_distribution(double delta, double zeta, int m, int big_m, int k_cells,
                              int n_per_cell);

// Neighborhood-consistency cost of match i: distances in the opposite image
// to the k nearest neighbors taken in each image. normalize applies the same
// per-image min-max rescale select_lpm uses.
double lpm_cost(const CorrespondenceSet& set, std::size_t i, int k, bool normalize);

// All costs at once (shared neighbor computation).
std::vector<double> lpm_costs(const CorrespondenceSet& set, int k, bool normalize);

// Objective value sum_i w_i (l_i - lambda) + lambda * N for a candidate
// selection; select_lpm minimizes this over all indicator vectors.
double lpm_total_cost(const CorrespondenceSet& set, const std::vector<bool>& selected,
                      double lambda, int k, bool normalize);

// Internal EM state of the displacement-field fit, exposed for inspection.
struct VfcFit {
  std::vector<double> posterior;
  double gamma = 0.0;
  double sigma2 = 0.0;
  int iterations = 0;
  bool converged = false;
};
VfcFit vfc_fit(const CorrespondenceSet& set, const VfcParams& params);

// Single-pair posterior given the squared residual, mixing weight, variance
// and uniform-component density 1/a.
double vfc_posterior(double r2, double gamma, double sigma2, double a);

}  // namespace corrsel
