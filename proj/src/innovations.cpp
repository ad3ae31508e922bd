#include "innovations.hpp"

#include <cmath>
#include <string>

#include "error.hpp"

namespace bkmcmc {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw DomainError("thinning parameter beta must lie in (0,1), got " + std::to_string(beta));
  }
}

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive, got " + std::to_string(v));
  }
}

}  // namespace

GammaInnovation::GammaInnovation(double shape_, double scale_, double beta_)
    : shape(shape_), scale(scale_), beta(beta_) {
  check_positive(shape, "innovation shape");
  check_positive(scale, "innovation scale");
  check_beta(beta);
}

ExpInnovation::ExpInnovation(double scale_, double beta_) : scale(scale_), beta(beta_) {
  check_positive(scale, "innovation scale");
  check_beta(beta);
}

BkInnovation::BkInnovation(double shape_, double scale_, double beta_)
    : shape(shape_), scale(scale_), beta(beta_) {
  check_positive(shape, "innovation shape");
  check_positive(scale, "innovation scale");
  check_beta(beta);
}

double sample_gamma_innovation(double shape, double scale, double beta, RngHandle& rng) {
  check_positive(shape, "innovation shape");
  check_positive(scale, "innovation scale");
  check_beta(beta);
  const double rate = shape * std::log(1.0 / beta);
  const std::int64_t terms = sample_poisson(rate, rng);
  double sum = 0.0;
  for (std::int64_t k = 0; k < terms; ++k) {
    const double eta = rng.uniform01();
    const double theta = sample_exponential(scale, rng);
    sum += std::pow(beta, eta) * theta;
  }
  return sum;
}

double sample_exp_innovation(double scale, double beta, RngHandle& rng) {
  check_positive(scale, "innovation scale");
  check_beta(beta);
  if (sample_bernoulli(1.0 - beta, rng) == 0) return 0.0;
  return sample_exponential(scale, rng);
}

double sample_bk_innovation(double shape, double scale, double beta, RngHandle& rng) {
  const double first = sample_gamma_innovation(shape, scale, beta, rng);
  const double second = sample_gamma_innovation(shape, scale, beta, rng);
  return first - second;
}

double sample_innovation(const InnovationLaw& law, RngHandle& rng) {
  struct Visitor {
    RngHandle& rng;
    double operator()(const GammaInnovation& l) const {
      return sample_gamma_innovation(l.shape, l.scale, l.beta, rng);
    }
    double operator()(const ExpInnovation& l) const {
      return sample_exp_innovation(l.scale, l.beta, rng);
    }
    double operator()(const BkInnovation& l) const {
      return sample_bk_innovation(l.shape, l.scale, l.beta, rng);
    }
  };
  return std::visit(Visitor{rng}, law);
}

std::complex<double> innovation_char_fn(const InnovationLaw& law, double s) {
  using namespace std::complex_literals;
  struct Visitor {
    double s;
    std::complex<double> operator()(const GammaInnovation& l) const {
      const std::complex<double> base = l.beta + (1.0 - l.beta) / (1.0 - 1i * s * l.scale);
      return std::pow(base, l.shape);
    }
    std::complex<double> operator()(const ExpInnovation& l) const {
      return l.beta + (1.0 - l.beta) / (1.0 - 1i * s * l.scale);
    }
    std::complex<double> operator()(const BkInnovation& l) const {
      const double x = s * l.scale;
      const double b2 = l.beta * l.beta;
      return std::pow(b2 + (1.0 - b2) / (1.0 + x * x), l.shape);
    }
  };
  return std::visit(Visitor{s}, law);
}

}  // namespace bkmcmc
