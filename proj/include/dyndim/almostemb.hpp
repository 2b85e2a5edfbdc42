#pragma once

#include <memory>
#include <vector>

#include "dyndim/certificate.hpp"
#include "dyndim/dynsys.hpp"
#include "dyndim/ground.hpp"
#include "dyndim/okcover.hpp"

namespace dyndim {

// Separation predicate and the constructive almost-embedding pipeline: build
// disjoint families from a mesh-zero cover, give each family's sets pairwise
// disjoint rational values, and certify that the orbit-matched fiber product
// of the resulting observable stays on the diagonal.

// A tuple of rational-valued functions sampled on the ground space, with
// cellwise-linear interpolation on grid kinds. Values live in [0,1].
struct Observable {
  std::shared_ptr<const GroundSpace> space;
  std::vector<std::vector<Rat>> components;  // [component][point]

  int d() const { return (int)components.size(); }
  void validate() const;
  ObsValues tuples() const;  // point-major view for the fiber product
};

// True iff the exact value sets of the family members under the component are
// pairwise disjoint. On grid spaces the value set of a member includes the
// segment spanned by each pair of adjacent atoms it contains, matching the
// cellwise-linear interpolation. Overlapping families are rejected.
bool separates(const GroundSpace& sp, const std::vector<Rat>& component,
               const std::vector<SetExpr>& family);

// Deterministic snap-value construction: points are grouped by their
// membership profile across every requested family level, classes get
// distinct grid midpoints (2i+1)/(2M) outside `avoid`, and the denominator
// doubles until enough values clear the avoid set. The result separates
// family j of every level; if the levels are not simultaneously separable by
// cellwise-linear values (possible only for non-nested levels on grid
// spaces), the replay rejects the request instead of returning a bad f.
Observable build_separating_observable(const std::vector<OkFamilies>& levels, int d,
                                       const std::vector<Rat>& avoid = {});

struct PipelineResult {
  Certificate cert;
  Observable observable;
  FiberProduct fiber;
};

// The almost-embedding recipe on a finite discrete system, one certified
// stage at a time: dimension bound below d/2 from the singleton partition,
// a mesh-zero cover with small orbit averages, disjoint families, a
// separating observable, the exact measure inequality over the fiber
// product's orbits, and the diagonal check. The first failing stage is named
// in the certificate. A supplied observable replaces the construction stage;
// its separation replay is recorded without gating, so adversarial inputs
// reach the fiber-product verdict.
PipelineResult thm103_run(const FinitePermSystem& sys, int d,
                          const Observable* supplied = nullptr);
Certificate thm103_pipeline(const FinitePermSystem& sys, int d,
                            const Observable* supplied = nullptr);

// Distal systems upgrade an almost embedding to an embedding: runs the
// pipeline and confirms by enumeration that the orbit-matched observable is
// injective, i.e. the fiber product is exactly the diagonal.
Certificate cor104_check(const FinitePermSystem& sys, int d);

struct DitherSample {
  unsigned seed = 0;
  bool separates_all = false;
  bool pipeline_pass = false;
};

// Empirical size of the set of good observables: each seed redraws the class
// values uniformly from the midpoint grid at the recorded resolution instead
// of taking the deterministic snaps, then replays separation and the full
// pipeline with that observable supplied.
struct DensityReport {
  int d = 1;
  int resolution = 0;  // denominator of the value grid the draws come from
  unsigned base_seed = 1;
  std::vector<DitherSample> samples;
  Rat separation_density = 0;
  Rat pass_density = 0;

  Json to_json() const;
};

// Seed i uses its own generator seeded with base_seed + i, so the partition
// of seeds across threads cannot change the report.
DensityReport estimate_separation_density(const FinitePermSystem& sys, int d, int num_seeds,
                                          unsigned base_seed = 1, int threads = 1);

}  // namespace dyndim
