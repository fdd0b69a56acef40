#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "faci.hpp"
#include "rng.hpp"
#include "student_core.hpp"
#include "wiener.hpp"

namespace facimean {

// Data-generating designs. Every design has a common mean (center of symmetry
// for the infinite-variance ones). The Cauchy design is the negative control:
// the max-ratio condition fails for it, so the Wiener-limit machinery must
// visibly break down.
struct IidNormal {
  double mu = 0.0;
  double sigma = 1.0;
};
struct HeteroNormal {
  double mu = 0.0;
  std::vector<double> sigma_pattern;  // cycled standard deviations
};
struct IidUniform {
  double mu = 0.0;
  double half_width = 1.0;
};
struct SymmetricTwoPoint {
  double mu = 0.0;
  double magnitude = 1.0;
};
struct SymmetricT {
  double mu = 0.0;
  double degrees_of_freedom = 2.0;
};
struct CauchyDesign {
  double mu = 0.0;
  double scale = 1.0;
};
using Design =
    std::variant<IidNormal, HeteroNormal, IidUniform, SymmetricTwoPoint, SymmetricT, CauchyDesign>;

struct DesignTraits {
  bool lindeberg_ok = false;    // finite-variance class with Lindeberg satisfied
  bool symmetric_ok = false;    // symmetric class with vanishing max ratio
  bool negative_control = false;
};

const char* design_kind_name(const Design& design) noexcept;
double design_center(const Design& design) noexcept;
DesignTraits design_traits(const Design& design) noexcept;
bool design_has_finite_variance(const Design& design) noexcept;

// Var Z_i for designs with finite variances (i is 0-based).
double design_variance_at(const Design& design, std::size_t i);

std::vector<double> generate_sample(const Design& design, std::size_t n, RngStream& rng);

// Lindeberg ratio s_n^{-2} sum_i E[(Z_i - mu)^2 1{|Z_i - mu| >= eps * s_n}],
// closed forms for normal/uniform/two-point components and adaptive
// quadrature for Student-t tails.
double lindeberg_profile(const Design& design, std::size_t n, double epsilon);

// s_n^{-2} sum Z_i^2 against the profile's total variance.
double raikov_diagnostic(std::span<const double> sample, const VarianceProfile& profile);

struct MethodSpec {
  IntervalMethod method = IntervalMethod::FixedT0;
  double t0 = 1.0;  // FixedT0 only
};

struct SimulationConfig {
  Design design;
  std::size_t n = 0;
  std::size_t replications = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::vector<MethodSpec> methods;       // coverage experiment
  std::vector<FunctionalKind> kinds;     // fit experiment
  std::vector<std::size_t> n_grid;       // discrepancy experiment
};

struct MethodCoverage {
  MethodSpec spec;
  std::size_t covered = 0;
  std::size_t not_covered = 0;
  std::size_t empty_count = 0;
  std::size_t error_count = 0;
  double coverage = 0.0;                 // covered / replications
  std::optional<double> mean_length;     // over valid non-empty intervals
  std::optional<double> median_length;
};

struct CoverageReport {
  SimulationConfig config;
  std::vector<MethodCoverage> methods;
  std::uint64_t duration_ms = 0;  // not persisted; reports must be bit-stable
};

struct KindFit {
  FunctionalKind kind;
  double ks_distance = 0.0;
  std::size_t sample_count = 0;
  std::size_t error_count = 0;
  std::string reference;
};

struct FitReport {
  SimulationConfig config;
  std::vector<KindFit> kinds;
  std::uint64_t duration_ms = 0;
};

struct DiscrepancyPoint {
  std::size_t n = 0;
  double median_sup_distance = 0.0;
};

struct DiscrepancyReport {
  SimulationConfig config;
  std::vector<DiscrepancyPoint> points;
  std::uint64_t duration_ms = 0;
};

// Coverage of the requested intervals at the design's true center. Empty
// intersections and ZeroTimeIndex failures count as non-coverage and are
// tallied separately. Bit-identical results for a fixed seed at any thread
// count: replication r always uses the stream derived from (seed, r) and
// aggregation runs over replication order.
CoverageReport coverage_experiment(const SimulationConfig& config, unsigned threads);

// Distributional fit of path functionals of the mean-centered Student process
// against their limit laws (one-sample KS distance, exact statistic).
FitReport fclt_fit_experiment(const SimulationConfig& config, unsigned threads);

// Median sup distance over a 1024-point t-grid between the true-variance and
// mean-centered-squares Student processes of the same centered samples, per n
// in config.n_grid.
DiscrepancyReport discrepancy_experiment(const SimulationConfig& config, unsigned threads);

// One-sample Kolmogorov-Smirnov distance against a continuous reference CDF
// (max of both one-sided gaps over the sorted sample).
double ks_distance(std::vector<double> values, const FunctionalKind& reference_kind);

// Exact one-replication sample regeneration, for dumps.
std::vector<double> replication_sample(const SimulationConfig& config, std::uint64_t replication);

unsigned default_thread_count() noexcept;

}  // namespace facimean
