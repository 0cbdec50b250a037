#pragma once

#include <string>

#include "nqs/config.hpp"

namespace nqs {

// Sweep-values x instances batch: per-run directories with curve.csv and
// final.rbm, a top-level summary.csv, and a manifest.json from which the
// whole experiment can be re-run. Returns the process exit code: 0 on
// success, 1 if any instance failed.
int run_experiment(const ExperimentConfig&);

// Single training run: curve.csv, final.rbm, manifest.json in out_dir.
int run_single(const ExperimentConfig&);

// Annealing driver: optional warm-up training at the first path point (or a
// checkpoint), then warm-started continuation along the path. Emits
// anneal.csv, curve.csv, final.rbm, manifest.json.
int run_anneal(const ExperimentConfig&);

// Supervised learnability run: infidelity.csv, final.cnet, manifest.json.
int run_supervised_experiment(const SupervisedConfig&);

}  // namespace nqs
