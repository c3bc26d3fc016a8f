#include "matmat/factorization.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "matmat/errors.hpp"

namespace matmat {

void validate(const TrainConfig& config) {
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (config.epochs < 1) throw ConfigError("epochs must be at least 1");
  if (config.d < 1) throw ConfigError("latent dimension d must be at least 1");
  if (!(config.init_std > 0.0) || !std::isfinite(config.init_std)) {
    throw ConfigError("init_std must be positive");
  }
  if (!(config.l2 >= 0.0) || !std::isfinite(config.l2)) throw ConfigError("l2 must be non-negative");
  if (!(config.clamp.lo < config.clamp.hi)) throw ConfigError("clamp range requires lo < hi");
}

namespace {

void fill_gaussian(std::span<double> out, double stddev, std::mt19937_64& rng,
                   std::normal_distribution<double>& normal) {
  for (double& v : out) v = stddev * normal(rng);
}

void shuffle(std::vector<std::size_t>& order, std::mt19937_64& rng) {
  for (std::size_t k = order.size(); k > 1; --k) {
    std::size_t j = static_cast<std::size_t>(rng() % k);
    std::swap(order[k - 1], order[j]);
  }
}

void check_dimensions(std::size_t n_users, std::size_t n_items, std::size_t t, std::size_t d) {
  if (n_users == 0 || n_items == 0 || t == 0 || d == 0) {
    throw ConfigError("model dimensions must be positive");
  }
}

MatMatModel init_matmat_from(std::mt19937_64& rng, const TrainConfig& config, std::size_t n_users,
                             std::size_t n_items, std::size_t t, double max_rating) {
  validate(config);
  check_dimensions(n_users, n_items, t, config.d);
  MatMatModel m;
  m.n_users = n_users;
  m.n_items = n_items;
  m.t = t;
  m.d = config.d;
  m.max_rating = max_rating;
  m.clamp = config.clamp;
  m.U = BlockBank(n_users, t, config.d);
  m.V = BlockBank(n_items, config.d, t);
  std::normal_distribution<double> normal(0.0, 1.0);
  fill_gaussian(m.U.flat(), config.init_std, rng, normal);
  fill_gaussian(m.V.flat(), config.init_std, rng, normal);
  return m;
}

ClassicModel init_classic_from(std::mt19937_64& rng, const TrainConfig& config, std::size_t n_users,
                               std::size_t n_items, double max_rating) {
  validate(config);
  check_dimensions(n_users, n_items, 1, config.d);
  ClassicModel m;
  m.n_users = n_users;
  m.n_items = n_items;
  m.d = config.d;
  m.max_rating = max_rating;
  m.clamp = config.clamp;
  m.P = BlockBank(n_users, 1, config.d);
  m.Q = BlockBank(n_items, 1, config.d);
  std::normal_distribution<double> normal(0.0, 1.0);
  fill_gaussian(m.P.flat(), config.init_std, rng, normal);
  fill_gaussian(m.Q.flat(), config.init_std, rng, normal);
  return m;
}

struct StepWorkspace {
  Matrix E, dU, dV;

  void resize(std::size_t t, std::size_t d) {
    if (E.rows() != t || dU.cols() != d) {
      E = Matrix(t, t);
      dU = Matrix(t, d);
      dV = Matrix(d, t);
    }
  }
};

void check_indices(std::size_t n_users, std::size_t n_items, UserIndex u, ItemIndex i) {
  if (u >= n_users) throw RangeError("user index " + std::to_string(u) + " out of range");
  if (i >= n_items) throw RangeError("item index " + std::to_string(i) + " out of range");
}

double sgd_step_impl(MatMatModel& model, UserIndex u, ItemIndex i, ConstMatrixView target, double lr, double l2,
                     StepWorkspace& ws) {
  ws.resize(model.t, model.d);
  MatrixView U = model.U.block(u);
  MatrixView V = model.V.block(i);
  block_residual(U, V, target, ws.E);
  block_gradient(U, V, ws.E, l2, ws.dU, ws.dV);
  for (std::size_t k = 0; k < U.size(); ++k) U.data()[k] -= lr * ws.dU.flat()[k];
  for (std::size_t k = 0; k < V.size(); ++k) V.data()[k] -= lr * ws.dV.flat()[k];
  if (!all_finite(U.flat()) || !all_finite(V.flat())) {
    throw TrainingError(std::nullopt, u, i, "non-finite factor after update");
  }
  return frobenius_squared(ws.E);
}

template <typename Model, typename Sample, typename StepFn>
LossTrace run_epochs(Model& model, std::span<const Sample> samples, const TrainConfig& config,
                     std::mt19937_64& rng, StepFn&& step) {
  if (samples.empty()) throw ConfigError("training set is empty");
  LossTrace trace;
  trace.epoch_loss.reserve(config.epochs);
  std::vector<std::size_t> order(samples.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(order, rng);
    try {
      for (std::size_t k : order) step(samples[k]);
    } catch (const TrainingError& e) {
      throw e.with_epoch(epoch);
    }
    double loss = objective(model, samples);
    if (!std::isfinite(loss)) {
      const Sample& s = samples[order.back()];
      throw TrainingError(epoch, s.user, s.item, "non-finite training loss");
    }
    trace.epoch_loss.push_back(loss);
  }
  return trace;
}

}  // namespace

MatMatModel init_matmat(const TrainConfig& config, std::size_t n_users, std::size_t n_items, std::size_t t,
                        double max_rating) {
  std::mt19937_64 rng(config.seed);
  return init_matmat_from(rng, config, n_users, n_items, t, max_rating);
}

ClassicModel init_classic(const TrainConfig& config, std::size_t n_users, std::size_t n_items,
                          double max_rating) {
  std::mt19937_64 rng(config.seed);
  return init_classic_from(rng, config, n_users, n_items, max_rating);
}

void block_residual(ConstMatrixView U, ConstMatrixView V, ConstMatrixView R, MatrixView E) {
  if (R.rows() != U.rows() || R.cols() != V.cols()) throw ShapeError("residual: target shape mismatch");
  multiply(U, V, E);
  for (std::size_t k = 0; k < E.size(); ++k) E.data()[k] -= R.data()[k];
}

double block_loss(ConstMatrixView U, ConstMatrixView V, ConstMatrixView R, double l2) {
  Matrix E(R.rows(), R.cols());
  block_residual(U, V, R, E);
  double loss = frobenius_squared(E);
  if (l2 != 0.0) loss += l2 * (frobenius_squared(U) + frobenius_squared(V));
  return loss;
}

void block_gradient(ConstMatrixView U, ConstMatrixView V, ConstMatrixView E, double l2, MatrixView dU,
                    MatrixView dV) {
  const std::size_t t = U.rows();
  const std::size_t d = U.cols();
  if (V.rows() != d || V.cols() != t || E.rows() != t || E.cols() != t || dU.rows() != t || dU.cols() != d ||
      dV.rows() != d || dV.cols() != t) {
    throw ShapeError("gradient: inconsistent block shapes");
  }
  for (std::size_t a = 0; a < t; ++a) {
    for (std::size_t k = 0; k < d; ++k) {
      double acc = 0.0;
      for (std::size_t b = 0; b < t; ++b) acc += E(a, b) * V(k, b);
      dU(a, k) = 2.0 * acc + 2.0 * l2 * U(a, k);
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t b = 0; b < t; ++b) {
      double acc = 0.0;
      for (std::size_t a = 0; a < t; ++a) acc += U(a, k) * E(a, b);
      dV(k, b) = 2.0 * acc + 2.0 * l2 * V(k, b);
    }
  }
}

Matrix matmat_residual(const MatMatModel& model, UserIndex u, ItemIndex i, const BlockTarget& target) {
  check_indices(model.n_users, model.n_items, u, i);
  if (target.t() != model.t || target.values.cols() != model.t) {
    throw ShapeError("target block is " + std::to_string(target.t()) + "x" + std::to_string(target.values.cols()) +
                     ", model expects " + std::to_string(model.t) + "x" + std::to_string(model.t));
  }
  Matrix E(model.t, model.t);
  block_residual(model.U.block(u), model.V.block(i), target.values, E);
  return E;
}

double sgd_step(MatMatModel& model, UserIndex u, ItemIndex i, ConstMatrixView target, double learning_rate,
                double l2) {
  check_indices(model.n_users, model.n_items, u, i);
  if (target.rows() != model.t || target.cols() != model.t) throw ShapeError("target block shape mismatch");
  StepWorkspace ws;
  return sgd_step_impl(model, u, i, target, learning_rate, l2, ws);
}

double sgd_step(ClassicModel& model, UserIndex u, ItemIndex i, double target, double learning_rate, double l2) {
  check_indices(model.n_users, model.n_items, u, i);
  double* p = model.P.block(u).data();
  double* q = model.Q.block(i).data();
  const std::size_t d = model.d;
  double dot = 0.0;
  for (std::size_t k = 0; k < d; ++k) dot += p[k] * q[k];
  const double e = dot - target;
  bool finite = true;
  for (std::size_t k = 0; k < d; ++k) {
    const double p_old = p[k];
    const double q_old = q[k];
    p[k] = p_old - learning_rate * (2.0 * (e * q_old) + 2.0 * l2 * p_old);
    q[k] = q_old - learning_rate * (2.0 * (p_old * e) + 2.0 * l2 * q_old);
    finite = finite && std::isfinite(p[k]) && std::isfinite(q[k]);
  }
  if (!finite) throw TrainingError(std::nullopt, u, i, "non-finite factor after update");
  return e * e;
}

double objective(const MatMatModel& model, std::span<const BlockSample> samples) {
  Matrix E(model.t, model.t);
  double total = 0.0;
  for (const auto& s : samples) {
    block_residual(model.U.block(s.user), model.V.block(s.item), s.target, E);
    total += frobenius_squared(E);
  }
  return total;
}

double objective(const ClassicModel& model, std::span<const ScalarSample> samples) {
  double total = 0.0;
  for (const auto& s : samples) {
    const double* p = model.P.block(s.user).data();
    const double* q = model.Q.block(s.item).data();
    double dot = 0.0;
    for (std::size_t k = 0; k < model.d; ++k) dot += p[k] * q[k];
    const double e = dot - s.target;
    total += e * e;
  }
  return total;
}

TrainResult<MatMatModel> train_blocks(std::span<const BlockSample> samples, std::size_t n_users,
                                      std::size_t n_items, std::size_t t, double max_rating,
                                      const TrainConfig& config) {
  std::mt19937_64 rng(config.seed);
  TrainResult<MatMatModel> result{init_matmat_from(rng, config, n_users, n_items, t, max_rating), {}};
  for (const auto& s : samples) {
    check_indices(n_users, n_items, s.user, s.item);
    if (s.target.rows() != t || s.target.cols() != t) throw ShapeError("training target block shape mismatch");
  }
  StepWorkspace ws;
  MatMatModel& model = result.model;
  result.trace = run_epochs(model, samples, config, rng, [&](const BlockSample& s) {
    sgd_step_impl(model, s.user, s.item, s.target, config.learning_rate, config.l2, ws);
  });
  return result;
}

TrainResult<ClassicModel> train_scalars(std::span<const ScalarSample> samples, std::size_t n_users,
                                        std::size_t n_items, double max_rating, const TrainConfig& config) {
  std::mt19937_64 rng(config.seed);
  TrainResult<ClassicModel> result{init_classic_from(rng, config, n_users, n_items, max_rating), {}};
  for (const auto& s : samples) check_indices(n_users, n_items, s.user, s.item);
  ClassicModel& model = result.model;
  result.trace = run_epochs(model, samples, config, rng, [&](const ScalarSample& s) {
    sgd_step(model, s.user, s.item, s.target, config.learning_rate, config.l2);
  });
  return result;
}

std::vector<BlockSample> training_blocks(const InteractionTable& table, const PopularityTable& pop,
                                         const BlockSpec& spec, const Split& split) {
  validate(spec);
  std::vector<BlockSample> samples;
  samples.reserve(split.train.size());
  for (std::size_t idx : split.train) {
    const Triple& tr = table.triples.at(idx);
    samples.push_back({tr.user, tr.item, build_target(spec, tr.user, tr.item, tr.rating, table, pop).values});
  }
  return samples;
}

std::vector<ScalarSample> training_scalars(const InteractionTable& table, const Split& split) {
  std::vector<ScalarSample> samples;
  samples.reserve(split.train.size());
  for (std::size_t idx : split.train) {
    const Triple& tr = table.triples.at(idx);
    samples.push_back({tr.user, tr.item, tr.rating / table.max_rating});
  }
  return samples;
}

TrainResult<MatMatModel> train_matmat(const InteractionTable& table, const PopularityTable& pop,
                                      const BlockSpec& spec, const Split& split, const TrainConfig& config) {
  validate(config);
  auto samples = training_blocks(table, pop, spec, split);
  return train_blocks(samples, table.n_users, table.n_items, spec.t, table.max_rating, config);
}

TrainResult<ClassicModel> train_classic(const InteractionTable& table, const Split& split,
                                        const TrainConfig& config) {
  validate(config);
  auto samples = training_scalars(table, split);
  return train_scalars(samples, table.n_users, table.n_items, table.max_rating, config);
}

double predict_matmat(const MatMatModel& model, UserIndex u, ItemIndex i) {
  check_indices(model.n_users, model.n_items, u, i);
  ConstMatrixView U = model.U.block(u);
  ConstMatrixView V = model.V.block(i);
  double diag_sum = 0.0;
  for (std::size_t k = 0; k < model.t; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < model.d; ++j) acc += U(k, j) * V(j, k);
    diag_sum += acc;
  }
  return model.clamp.apply(model.max_rating * (diag_sum / static_cast<double>(model.t)));
}

double predict_classic(const ClassicModel& model, UserIndex u, ItemIndex i) {
  check_indices(model.n_users, model.n_items, u, i);
  const double* p = model.P.block(u).data();
  const double* q = model.Q.block(i).data();
  double dot = 0.0;
  for (std::size_t k = 0; k < model.d; ++k) dot += p[k] * q[k];
  return model.clamp.apply(model.max_rating * dot);
}

}  // namespace matmat
