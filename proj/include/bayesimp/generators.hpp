#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bayesimp/dataset.hpp"
#include "bayesimp/gp.hpp"
#include "bayesimp/rng.hpp"

namespace bayesimp {

enum class GeneratorKind { Ablation, SimpleSynthetic, HardSynthetic, Healthcare };
const char* generator_kind_name(GeneratorKind kind);

// PSA -> cancer-volume link: a GP fitted to the bundled point set, sampled as
// a generator for D2 and for interventional volume draws.
class HealthcareLink {
 public:
  static HealthcareLink from_fixture(const std::string& csv_path);

  double sample(double psa, RngStream& rng) const;  // posterior draw + noise
  double psa_lo() const { return psa_lo_; }
  double psa_hi() const { return psa_hi_; }

 private:
  GpModel gp_;
  double psa_lo_ = 0.0;
  double psa_hi_ = 1.0;
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Ablation;
  double noise = 0.1;        // ablation / simple synthetic; the hard graph pins 1.0
  double pi = 0.0;           // mixture weight
  std::string treatment;     // do-variable; empty = default for the kind
  std::string fixture_path;  // healthcare PSA/volume table

  std::string effective_treatment() const;
  void validate() const;
};

struct GeneratedData {
  DataTable d1;
  DataTable d2;
};

// Deterministic in the stream: d1 rows come from rng.substream("d1"), d2 from
// rng.substream("d2"). Column layouts:
//   ablation:  d1 = (x, y)                      d2 = (y, t)
//   simple:    d1 = (x, u, z, y)                d2 = (y, t)
//   hard:      d1 = (u1, u2, f, a, b, c, d, e, y)  d2 = (y, t)
//   healthcare d1 = (age, bmi, aspirin, statin, cancer, psa)  d2 = (psa, volume)
GeneratedData generate(const GeneratorSpec& spec, int n, int m, RngStream rng);

// One observational or mutilated draw of the full structural system. Every
// exogenous variable is drawn in a fixed order whether or not an intervention
// is applied, so do(X = observed x) with the same stream reproduces the
// downstream values of the observational draw exactly.
double sample_target(const GeneratorSpec& spec, std::optional<double> do_value,
                     RngStream& rng, const HealthcareLink* link);

class InterventionOracle {
 public:
  InterventionOracle(GeneratorSpec spec, int mc_per_query = 200);

  // One T sample under do(treatment)=x.
  double draw(double x, RngStream& rng) const;
  // Mean of mc_per_query draws: one intervention "experiment".
  double query(double x, RngStream& rng) const;
  int mc_per_query() const { return mc_; }
  const GeneratorSpec& spec() const { return spec_; }

 private:
  GeneratorSpec spec_;
  int mc_ = 200;
  std::shared_ptr<const HealthcareLink> link_;
};

struct TrueEffect {
  double value = 0.0;
  double std_error = 0.0;
};
// Monte-Carlo ground truth for E[T|do(X)=x].
TrueEffect true_effect(const InterventionOracle& oracle, double x, int mc_samples,
                       RngStream rng);

// Coverage of central credible intervals. means/stds: one vector per seed,
// indexed like `truth`. Deviation = mean over the mass grid of
// |empirical - nominal|; per-seed deviations keep the same definition with the
// coverage fraction taken over that seed's cells only.
struct CalibrationRow {
  double nominal = 0.0;
  double empirical = 0.0;
};
struct CalibrationTable {
  std::vector<CalibrationRow> rows;  // pooled over (seed, x) cells
  double mean_abs_deviation = 0.0;
  std::vector<double> per_seed_deviation;
};
CalibrationTable calibration_analysis(const std::vector<VectorXd>& means,
                                      const std::vector<VectorXd>& stds,
                                      const VectorXd& truth, const VectorXd& mass_grid);

}  // namespace bayesimp
