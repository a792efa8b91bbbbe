#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "quadint/errors.hpp"
#include "quadint/fields.hpp"
#include "quadint/geometry.hpp"
#include "quadint/norms.hpp"

namespace quadint {

/// Parametric element families used by the studies.
///   Cex1:      K(1, s, s, 2s),                  0 < s < 1/2
///   Cex2:      K(1, 1, s, s),                   1/2 < s <= 5/8
///   TriDegen:  (0,0), (1,0), (s,1-s), (0,1-s),  0 < s < 1
///   RandomConvex / User: drawn or supplied, no single parameter.
enum class Family { Cex1, Cex2, TriDegen, RandomConvex, User };

/// Names: "cex1", "cex2", "tridegen", "random", "user".
Family parse_family(const std::string& name);
const char* family_name(Family f);

/// Shape for a single-parameter family; GridOutOfRange outside the ranges
/// above, PreconditionFailed for families without a parameter.
ConvexQuad family_quad(Family family, double s);

/// Deterministic stream: mt19937_64 with a fixed bits-to-double mapping, so
/// identical seeds give identical quads on every platform.
class SweepRng {
 public:
  explicit SweepRng(std::uint64_t seed) : eng_(seed) {}
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 eng_;
};

/// Independent sub-seed for item `index` of a run seeded with `seed`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// Random strictly convex quad: four distinct sorted angles on the unit
/// circle, anisotropic stretch up to max_aniso, random rotation, scale and
/// shift; rejection keeps every interior angle >= min_angle.
ConvexQuad random_convex_quad(SweepRng& rng, double max_aniso = 50.0,
                              double min_angle = 0.01);

/// One grid point of a sweep.  aux1/aux2 carry study-specific diagnostics
/// (documented per study); converged means every quadrature in the row
/// reported convergence.
struct SweepRow {
  double param = 0.0;
  double h = 0.0;
  double err_w1p = 0.0;
  double err_lp = 0.0;
  double semnorm_u = 0.0;
  double ratio_seminorm = 0.0;  // err_w1p / (h^k semnorm_u)
  double ratio_lp = 0.0;        // err_lp / (h^{k+1} semnorm_u)
  double aux1 = 0.0;
  double aux2 = 0.0;
  bool converged = false;
};

/// Least-squares slope of log y against log x over the `window` points with
/// the smallest x.  residual is the RMS deviation of log y from the fit;
/// conclusive requires at least 4 usable points, positive data, and
/// residual < 0.05 (below that, slope assertions may fire).
struct RateEstimate {
  double slope = 0.0;
  double residual = 0.0;
  int window = 0;
  bool conclusive = false;
};

RateEstimate fit_rate(const std::vector<double>& x,
                      const std::vector<double>& y, int window = 4);

enum class Verdict { Diverges, Bounded, Converged, Failed, Inconclusive };
const char* verdict_name(Verdict v);

/// Common knobs.  quad_order 0 keeps each norm's default rule; field
/// overrides the probe field where the study admits one (convergence,
/// lp-uniformity, constant-vs-angle); jobs > 1 evaluates independent grid
/// points on worker threads (results are merged by index, so output is
/// identical for every job count).
struct StudyOptions {
  int quad_order = 0;
  int rate_window = 4;
  int jobs = 1;
  std::string field;
};

struct StudyResult {
  std::string study;
  int k = 0;
  double p = 0.0;
  std::vector<SweepRow> rows;  // sorted by param ascending
  RateEstimate rate;           // primary fit (study-specific, see run_*)
  RateEstimate rate2;          // secondary fit where meaningful
  Verdict verdict = Verdict::Inconclusive;
  double max_ratio = 0.0;  // lp-uniformity: max ratio_lp over all rows
  std::vector<std::string> warnings;
};

/// Degeneration study on K(1, s, s, 2s) with the built-in cubic field, k = 2,
/// 1 <= p < 3.  aux1 = |d phi_11 / dy|_{0,p,K}, aux2 = |d Q2 u / dy|_{0,p,K}.
/// rate fits aux1 against s (expected slope -1/q); rate2 fits ratio_seminorm
/// against s (divergence requires slope <= -0.8).  Verdict Diverges when both
/// hold, Failed when a conclusive fit contradicts them, else Inconclusive.
StudyResult run_cex1(double p, const std::vector<double>& s_grid,
                     const StudyOptions& opt = {});

/// Degeneration study on K(1, 1, s, s) with the built-in quintic field,
/// k = 2, p >= 1.  aux1 = |d phi_22 / dy|_{0,p,K}, aux2 = |u(M_22)|.
/// rate fits aux1^p against s - 1/2 (expected slope 3 - p); rate2 fits
/// ratio_seminorm against s - 1/2.  For p > 3 the verdict is Diverges when
/// the fitted slope is within 0.2 of 3 - p; for p = 3 when aux1 grows
/// monotonically toward s = 1/2; for p < 3 the study is a boundedness
/// control: Bounded when ratio_seminorm varies by less than a factor 2.
/// Every path also requires min angle >= pi/4 and |u(M_22)| > 1e-3.
StudyResult run_cex2(double p, const std::vector<double>& s_grid,
                     const StudyOptions& opt = {});

/// L^p interpolation ratio over num_random random quads (min angle down to
/// 0.01) plus the four K(1, s, s, 2s) elements s in {0.2, 0.1, 0.05, 0.025}.
/// param = row index; the probe field is a product-sine bump on each
/// element's bounding box; aux1/aux2 = min/max interior angle.  max_ratio
/// collects ratio_lp; verdict Bounded when every row is finite.
StudyResult run_lp_uniformity(int k, double p, int num_random,
                              std::uint64_t seed,
                              const StudyOptions& opt = {});

/// Shrinks `shape` about its first vertex to each diameter in h_levels and
/// measures interpolation errors for a fixed smooth field (default: a
/// product-sine bump on the bounding box of the largest level).  param = h,
/// aux1/aux2 = min/max interior angle.  rate fits err_w1p ~ h^k, rate2 fits
/// err_lp ~ h^{k+1}; Converged when both slopes are within 0.1.  When the
/// shape misses the sufficient condition for (k, p), a "ConditionViolated"
/// warning is recorded and the study still runs.
StudyResult run_convergence(const ConvexQuad& shape, int k, double p,
                            const std::vector<double>& h_levels,
                            const StudyOptions& opt = {});

/// Empirical constant against the degenerating angle.  style Cex1 sweeps the
/// minimal angle psi in (0, pi/2) via s = tan(psi) / (2 + tan(psi)); style
/// Cex2 sweeps the maximal angle psi via s = (1 + sqrt((1+cos psi)/(1-cos
/// psi))) / 2 (psi must keep s <= 5/8).  param = psi, C_emp = ratio_seminorm,
/// aux1 = family parameter s, aux2 = the attained extreme angle.  Default
/// field: the family's counterexample field for k = 2, a bounding-box bump
/// otherwise.  Verdict Bounded when C_emp varies by less than a factor 2,
/// Diverges when the most degenerate point exceeds 4x the least degenerate.
StudyResult run_constant_vs_angle(Family style, int k, double p,
                                  const std::vector<double>& angle_grid,
                                  const StudyOptions& opt = {});

/// CSV with the fixed header
/// param,h,err_w1p,err_lp,semnorm_u,ratio_seminorm,ratio_lp,aux1,aux2,converged
/// and 17-significant-digit values; byte-identical across reruns.
std::string to_csv(const std::vector<SweepRow>& rows);

/// One-line JSON {study, k, p, slope, residual, verdict}.
std::string summary_json(const StudyResult& r);

}  // namespace quadint
