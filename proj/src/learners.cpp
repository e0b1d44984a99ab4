// Copyright 2026 The csdpp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "csdpp/learners.hpp"

#include <cmath>

#include "csdpp/checkpoint.hpp"
#include "csdpp/errors.hpp"
#include "csdpp/rng.hpp"

namespace csdpp {

using nlohmann::json;

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kDppPbc: return "dpp-pbc";
    case Algorithm::kDppPbt: return "dpp-pbt";
    case Algorithm::kDppNaive: return "dpp-naive";
    case Algorithm::kCsDppPbc: return "cs-dpp-pbc";
    case Algorithm::kCsDppPbt: return "cs-dpp-pbt";
    case Algorithm::kObr: return "o-br";
    case Algorithm::kOrand: return "o-rand";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kDppPbc, Algorithm::kDppPbt, Algorithm::kDppNaive, Algorithm::kCsDppPbc,
                      Algorithm::kCsDppPbt, Algorithm::kObr, Algorithm::kOrand})
    if (algorithm_name(a) == name) return a;
  return std::nullopt;
}

bool is_cost_sensitive(Algorithm a) { return a == Algorithm::kCsDppPbc || a == Algorithm::kCsDppPbt; }

bool uses_label_reduction(Algorithm a) { return a != Algorithm::kObr; }

int code_dim_from_fraction(double fraction, int label_dim) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("M fraction must lie in (0, 1]");
  // Guard against fractions like 0.3 * 10 = 3.0000000000000004.
  const int m = static_cast<int>(std::ceil(fraction * label_dim - 1e-9));
  return std::clamp(m, 1, label_dim);
}

Vector decode(const ProjectionMatrix<double>& p, const Vector& code, const Vector& reference) {
  if (code.size() != p.code_dim()) throw DimensionError("decode: code length mismatch");
  Vector v = p.rows.transpose() * code;
  if (reference.size() != 0) {
    if (reference.size() != v.size()) throw DimensionError("decode: reference length mismatch");
    v += reference;
  }
  return sign_of(v);
}

Learner::Learner(LearnerConfig config, int feature_dim, int label_dim)
    : config_(std::move(config)),
      cost_(config_.custom_cost ? *config_.custom_cost : cost_by_name(config_.cost_name)),
      feature_dim_(feature_dim),
      label_dim_(label_dim) {
  if (feature_dim < 1 || label_dim < 1) throw ConfigError("learner: d and K must be positive");
  if (!(config_.lambda > 0.0)) throw ConfigError("learner: lambda must be positive");
}

PredictionRecord Learner::step(const Vector& x, const Vector& y) {
  if (x.size() != feature_dim_ || y.size() != label_dim_) throw DimensionError("learner: instance shape mismatch");
  const auto start = std::chrono::steady_clock::now();
  PredictionRecord rec;
  rec.y_hat = predict(x);
  rec.incurred_cost = cost_(y, rec.y_hat);
  observe(x, y, rec.y_hat);
  rec.t = t_;
  rec.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
  return rec;
}

namespace {

constexpr const char* kLearnerFormat = "csdpp-learner";

json header(const Learner& l) {
  return {{"format", kLearnerFormat},
          {"version", kCheckpointVersion},
          {"algorithm", algorithm_name(l.config().algorithm)},
          {"d", l.feature_dim()},
          {"K", l.label_dim()}};
}

json check_header(const std::string& text, const Learner& l) {
  json j = json::parse(text);
  if (j.value("format", "") != kLearnerFormat || j.value("version", 0) != kCheckpointVersion)
    throw SchemaError("learner checkpoint: unknown format or version");
  if (j.at("algorithm").get<std::string>() != algorithm_name(l.config().algorithm) ||
      j.at("d").get<int>() != l.feature_dim() || j.at("K").get<int>() != l.label_dim())
    throw SchemaError("learner checkpoint: does not match this learner's configuration");
  return j;
}

enum class Remedy { kCorrection, kTransform, kNone };

/// DPP and CS-DPP: Capped MSG encoder sampled every round plus one of the
/// three regressors.
class DppLearner final : public Learner {
 public:
  DppLearner(const LearnerConfig& config, int d, int k) : Learner(config, d, k), sampler_rng_(0) {
    const int m = config_.code_dim;
    if (m < 1 || m > k) throw ConfigError("dpp: need 1 <= M <= K");
    switch (config_.algorithm) {
      case Algorithm::kDppPbc:
      case Algorithm::kCsDppPbc: remedy_ = Remedy::kCorrection; break;
      case Algorithm::kDppPbt:
      case Algorithm::kCsDppPbt: remedy_ = Remedy::kTransform; break;
      default: remedy_ = Remedy::kNone; break;
    }
    cost_sensitive_ = is_cost_sensitive(config_.algorithm);
    order_ = config_.label_order ? *config_.label_order : LabelOrder::identity(k);
    if (!order_.valid(k)) throw ConfigError("dpp: label order is not a permutation of the labels");
    if (cost_sensitive_ && !config_.allow_condition_violation) {
      Rng probe = Rng::substream(config_.seed, StreamPurpose::kVerify);
      const auto report = check_condition(cost_, 2000, std::min(k, 12), probe, 1);
      if (!report.passed())
        throw ConfigError("cost '" + cost_.name + "' violates the label-weight condition; "
                          "set allow_condition_violation to override");
    }

    sampler_rng_ = Rng::substream(config_.seed, StreamPurpose::kSampler);
    full_basis_ = m == k;
    if (full_basis_) {
      // tr U = K with 0 <= U <= I forces U = I; any orthogonal basis works.
      current_.rows = Matrix::Identity(k, k);
    } else {
      msg_ = CappedMsg<double>::init(k, m, config_.seed, config_.eta);
      current_ = msg_.sample_projection(sampler_rng_);
    }
    const double lambda = config_.lambda;
    switch (remedy_) {
      case Remedy::kCorrection: pbc_ = PbcState<double>::make(d, k, lambda); break;
      case Remedy::kTransform: pbt_ = PbtState<double>::make(d, lambda, current_); break;
      case Remedy::kNone: naive_ = NaiveState<double>::make(d, m, lambda); break;
    }
  }

  Vector predict(const Vector& x) override {
    Vector code;
    switch (remedy_) {
      case Remedy::kCorrection: code = pbc_predict(pbc_, x, current_); break;
      case Remedy::kTransform: code = pbt_predict(pbt_, x); break;
      case Remedy::kNone: code = naive_predict(naive_, x); break;
    }
    if (observer_ && remedy_ == Remedy::kCorrection) {
      RegretSnapshot snap;
      snap.t = t_ + 1;
      if (full_basis_) {
        snap.q = Matrix::Identity(label_dim_, label_dim_);
        snap.sigma = Vector::Ones(label_dim_);
      } else {
        snap.q = msg_.q();
        snap.sigma = msg_.sigma();
      }
      snap.h = pbc_.h;
      observer_(snap);
    }
    Vector y_hat = decode(current_, code);
    if (audit_on_) audit_ = StepAudit{current_, code, Vector()};
    return y_hat;
  }

  void observe(const Vector& x, const Vector& y, const Vector& y_hat) override {
    ++t_;
    Vector target;
    if (cost_sensitive_) {
      const WeightDiagonal w = label_weights(cost_, y, y_hat, order_);
      target = weight_matrix(w).cwiseProduct(y);
    } else {
      target = y / std::sqrt(static_cast<double>(label_dim_));
    }
    if (audit_on_ && audit_) audit_->target = target;

    ProjectionMatrix<double> next = current_;
    if (!full_basis_) {
      // C y can leave the unit ball; the encoder only sees its direction then.
      const double norm = target.norm();
      if (norm > 1.0 + Tolerances::kUnitNorm)
        msg_.update(target / norm);
      else
        msg_.update(target);
      next = msg_.sample_projection(sampler_rng_);
    }

    const bool sgd = config_.engine == RegressionEngine::kSgd;
    const double step = config_.sgd(t_);
    switch (remedy_) {
      case Remedy::kCorrection:
        if (sgd)
          sgd_update(pbc_.h, x, target, step);
        else
          pbc_update(pbc_, x, target);
        break;
      case Remedy::kTransform:
        if (sgd)
          pbt_sgd_update(pbt_, x, target, next, step);
        else
          pbt_update(pbt_, x, target, next);
        break;
      case Remedy::kNone: {
        const Vector z = current_.rows * target;
        if (sgd)
          sgd_update(naive_.w, x, z, step);
        else
          naive_update(naive_, x, z);
        break;
      }
    }
    current_ = std::move(next);
  }

  std::string snapshot() const override {
    json j = header(*this);
    j["t"] = t_;
    j["full_basis"] = full_basis_;
    if (!full_basis_) j["msg"] = msg_to_json(msg_);
    j["current"] = matrix_to_json(current_.rows);
    j["sampler_rng"] = rng_to_json(sampler_rng_);
    switch (remedy_) {
      case Remedy::kCorrection:
        j["ridge"] = ridge_to_json(pbc_.common);
        j["h"] = matrix_to_json(pbc_.h);
        break;
      case Remedy::kTransform:
        j["ridge"] = ridge_to_json(pbt_.common);
        j["w"] = matrix_to_json(pbt_.w);
        break;
      case Remedy::kNone:
        j["ridge"] = ridge_to_json(naive_.common);
        j["w"] = matrix_to_json(naive_.w);
        break;
    }
    return j.dump();
  }

  void restore(const std::string& text) override {
    const json j = check_header(text, *this);
    t_ = j.at("t").get<std::int64_t>();
    if (!full_basis_) msg_ = msg_from_json(j.at("msg"));
    current_.rows = matrix_from_json(j.at("current"));
    rng_from_json(j.at("sampler_rng"), sampler_rng_);
    switch (remedy_) {
      case Remedy::kCorrection:
        pbc_.common = ridge_from_json(j.at("ridge"));
        pbc_.h = matrix_from_json(j.at("h"));
        break;
      case Remedy::kTransform:
        pbt_.common = ridge_from_json(j.at("ridge"));
        pbt_.w = matrix_from_json(j.at("w"));
        pbt_.basis = current_;
        break;
      case Remedy::kNone:
        naive_.common = ridge_from_json(j.at("ridge"));
        naive_.w = matrix_from_json(j.at("w"));
        break;
    }
  }

 private:
  Remedy remedy_ = Remedy::kCorrection;
  bool cost_sensitive_ = false;
  bool full_basis_ = false;
  LabelOrder order_;
  CappedMsg<double> msg_;
  Rng sampler_rng_;
  ProjectionMatrix<double> current_;
  PbcState<double> pbc_;
  PbtState<double> pbt_;
  NaiveState<double> naive_;
};

/// Online binary relevance: K independent ridge regressors (the PBC
/// solution H used directly, P = I).
class ObrLearner final : public Learner {
 public:
  ObrLearner(const LearnerConfig& config, int d, int k)
      : Learner(config, d, k), pbc_(PbcState<double>::make(d, k, config.lambda)) {}

  Vector predict(const Vector& x) override {
    const Vector score = pbc_.h.transpose() * x;
    if (audit_on_) audit_ = StepAudit{ProjectionMatrix<double>{Matrix::Identity(label_dim_, label_dim_)}, score, {}};
    return sign_of(score);
  }

  void observe(const Vector& x, const Vector& y, const Vector&) override {
    ++t_;
    // Same 1/sqrt(K) convention as DPP, so M = K with P = I replays exactly.
    const Vector target = y / std::sqrt(static_cast<double>(label_dim_));
    if (audit_on_ && audit_) audit_->target = target;
    if (config_.engine == RegressionEngine::kSgd)
      sgd_update(pbc_.h, x, target, config_.sgd(t_));
    else
      pbc_update(pbc_, x, target);
  }

  std::string snapshot() const override {
    json j = header(*this);
    j["t"] = t_;
    j["ridge"] = ridge_to_json(pbc_.common);
    j["h"] = matrix_to_json(pbc_.h);
    return j.dump();
  }

  void restore(const std::string& text) override {
    const json j = check_header(text, *this);
    t_ = j.at("t").get<std::int64_t>();
    pbc_.common = ridge_from_json(j.at("ridge"));
    pbc_.h = matrix_from_json(j.at("h"));
  }

 private:
  PbcState<double> pbc_;
};

/// Fixed Gaussian encoder P_R, ridge toward P_R y, decode with pinv(P_R).
class OrandLearner final : public Learner {
 public:
  OrandLearner(const LearnerConfig& config, int d, int k) : Learner(config, d, k) {
    const int m = config_.code_dim;
    if (m < 1 || m > k) throw ConfigError("o-rand: need 1 <= M <= K");
    Rng rng = Rng::substream(config_.seed, StreamPurpose::kRandomProjection);
    encoder_.resize(m, k);
    for (Eigen::Index j = 0; j < encoder_.cols(); ++j)
      for (Eigen::Index i = 0; i < encoder_.rows(); ++i) encoder_(i, j) = rng.normal();
    decoder_ = encoder_.completeOrthogonalDecomposition().pseudoInverse();
    naive_ = NaiveState<double>::make(d, m, config_.lambda);
  }

  Vector predict(const Vector& x) override {
    const Vector code = naive_predict(naive_, x);
    if (audit_on_) audit_ = StepAudit{ProjectionMatrix<double>{encoder_}, code, {}};
    return sign_of(decoder_ * code);
  }

  void observe(const Vector& x, const Vector& y, const Vector&) override {
    ++t_;
    const Vector target = y / std::sqrt(static_cast<double>(label_dim_));
    if (audit_on_ && audit_) audit_->target = target;
    const Vector z = encoder_ * target;
    if (config_.engine == RegressionEngine::kSgd)
      sgd_update(naive_.w, x, z, config_.sgd(t_));
    else
      naive_update(naive_, x, z);
  }

  std::string snapshot() const override {
    json j = header(*this);
    j["t"] = t_;
    j["encoder"] = matrix_to_json(encoder_);
    j["ridge"] = ridge_to_json(naive_.common);
    j["w"] = matrix_to_json(naive_.w);
    return j.dump();
  }

  void restore(const std::string& text) override {
    const json j = check_header(text, *this);
    t_ = j.at("t").get<std::int64_t>();
    encoder_ = matrix_from_json(j.at("encoder"));
    decoder_ = encoder_.completeOrthogonalDecomposition().pseudoInverse();
    naive_.common = ridge_from_json(j.at("ridge"));
    naive_.w = matrix_from_json(j.at("w"));
  }

  const Matrix& encoder() const { return encoder_; }

 private:
  Matrix encoder_;
  Matrix decoder_;
  NaiveState<double> naive_;
};

}  // namespace

std::unique_ptr<Learner> make_learner(const LearnerConfig& config, int feature_dim, int label_dim) {
  switch (config.algorithm) {
    case Algorithm::kObr: return std::make_unique<ObrLearner>(config, feature_dim, label_dim);
    case Algorithm::kOrand: return std::make_unique<OrandLearner>(config, feature_dim, label_dim);
    default: return std::make_unique<DppLearner>(config, feature_dim, label_dim);
  }
}

}  // namespace csdpp
