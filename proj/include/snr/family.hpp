#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace snr {

enum class FamilyName { poisson, gaussian, gamma };

// Exponential-family response distribution with its canonical-for-us link:
// poisson/log, gaussian/identity, gamma/log. The scale psi is fixed at 1 for
// poisson and estimated from the deviance otherwise.
class Family {
public:
    explicit Family(FamilyName name) : name_(name) {}

    static Family poisson() { return Family(FamilyName::poisson); }
    static Family gaussian() { return Family(FamilyName::gaussian); }
    static Family gamma() { return Family(FamilyName::gamma); }

    static Family parse(const std::string& s) {
        if (s == "poisson") return poisson();
        if (s == "gaussian") return gaussian();
        if (s == "gamma") return gamma();
        throw std::invalid_argument("unknown family: " + s);
    }

    FamilyName name() const { return name_; }

    const char* label() const {
        switch (name_) {
            case FamilyName::poisson: return "poisson";
            case FamilyName::gaussian: return "gaussian";
            case FamilyName::gamma: return "gamma";
        }
        return "";
    }

    bool log_link() const { return name_ != FamilyName::gaussian; }
    bool estimate_scale() const { return name_ != FamilyName::poisson; }

    double link(double mu) const { return log_link() ? std::log(mu) : mu; }
    double inverse_link(double eta) const { return log_link() ? std::exp(eta) : eta; }
    double mu_eta(double mu) const { return log_link() ? mu : 1.0; }

    double variance(double mu) const {
        switch (name_) {
            case FamilyName::poisson: return mu;
            case FamilyName::gaussian: return 1.0;
            case FamilyName::gamma: return mu * mu;
        }
        return 1.0;
    }

    void validate_response(const Eigen::VectorXd& y) const {
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            if (!std::isfinite(y[i]))
                throw std::invalid_argument("non-finite response value");
            if (name_ == FamilyName::poisson && y[i] < 0.0)
                throw std::invalid_argument("poisson response must be >= 0");
            if (name_ == FamilyName::gamma && y[i] <= 0.0)
                throw std::invalid_argument("gamma response must be > 0");
        }
    }

    Eigen::VectorXd initial_mu(const Eigen::VectorXd& y) const {
        Eigen::VectorXd mu(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            switch (name_) {
                case FamilyName::poisson: mu[i] = y[i] + 0.1; break;
                case FamilyName::gaussian: mu[i] = y[i]; break;
                case FamilyName::gamma: mu[i] = std::max(y[i], 1e-8); break;
            }
        }
        return mu;
    }

    double unit_deviance(double y, double mu) const {
        switch (name_) {
            case FamilyName::poisson: {
                double t = y > 0.0 ? y * std::log(y / mu) - (y - mu) : mu;
                return 2.0 * t;
            }
            case FamilyName::gaussian: {
                double r = y - mu;
                return r * r;
            }
            case FamilyName::gamma:
                return 2.0 * (-std::log(y / mu) + (y - mu) / mu);
        }
        return 0.0;
    }

    double deviance(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                    const Eigen::VectorXd& weights) const {
        double d = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i)
            d += weights[i] * unit_deviance(y[i], mu[i]);
        return d;
    }

    // Full log-likelihood at the fitted means, evaluated with the given
    // scale. Prior weights act as replication counts.
    double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                          const Eigen::VectorXd& weights, double psi) const {
        double ll = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            double w = weights[i];
            switch (name_) {
                case FamilyName::poisson:
                    ll += w * (y[i] * std::log(mu[i]) - mu[i] - std::lgamma(y[i] + 1.0));
                    break;
                case FamilyName::gaussian: {
                    double r = y[i] - mu[i];
                    ll += -0.5 * (std::log(2.0 * M_PI * psi / w) + w * r * r / psi);
                    break;
                }
                case FamilyName::gamma: {
                    double nu = w / psi;
                    ll += nu * std::log(nu * y[i] / mu[i]) - nu * y[i] / mu[i] -
                          std::log(y[i]) - std::lgamma(nu);
                    break;
                }
            }
        }
        return ll;
    }

private:
    FamilyName name_;
};

}  // namespace snr
