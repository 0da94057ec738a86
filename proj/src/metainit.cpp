#include "qmimo/metainit.hpp"

namespace qmimo {

Box AngleBounds::box(std::size_t depth) const {
  if (depth == 0) throw DomainError("QAOA depth must be at least 1");
  if (!(gamma_max > 0.0) || !(beta_max > 0.0)) throw DomainError("angle bounds must be positive");
  std::vector<double> lo(2 * depth, 0.0);
  std::vector<double> hi(2 * depth);
  for (std::size_t l = 0; l < depth; ++l) {
    hi[l] = gamma_max;
    hi[depth + l] = beta_max;
  }
  return Box(std::move(lo), std::move(hi));
}

EnsembleObjective::EnsembleObjective(std::span<const IsingModel> models) {
  if (models.empty()) throw DomainError("ensemble objective needs at least one model");
  circuits_.reserve(models.size());
  for (const auto& m : models) circuits_.emplace_back(m);
}

double EnsembleObjective::operator()(const QaoaParams& params) const {
  double total = 0.0;
  for (const auto& c : circuits_) total += c.expectation(params);
  return total / static_cast<double>(circuits_.size());
}

double meta_objective(std::span<const IsingModel> models, const QaoaParams& params) {
  return EnsembleObjective(models)(params);
}

InitParams train_init(std::span<const ChannelInstance> instances, const TrainOptions& options) {
  if (instances.empty()) throw DomainError("training needs at least one instance");
  std::vector<IsingModel> models;
  models.reserve(instances.size());
  for (const auto& inst : instances) models.push_back(build_ising(inst));

  const EnsembleObjective fp(models);
  const Box box = options.bounds.box(options.depth);
  const auto history = bayes_opt(
      [&](std::span<const double> angles) { return -fp(QaoaParams::from_flat(angles)); }, box,
      options.bo);

  InitParams out;
  out.params = QaoaParams::from_flat(history.best_point);
  out.bounds = options.bounds;
  out.meta.instance_count = instances.size();
  out.meta.rounds = options.bo.rounds;
  out.meta.n_init = options.bo.n_init;
  out.meta.kappa = options.bo.kappa;
  out.meta.seed = options.bo.seed;
  out.meta.final_objective = -history.best_value;
  out.history = history;
  return out;
}

}  // namespace qmimo
