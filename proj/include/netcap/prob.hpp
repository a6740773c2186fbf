// Finite probability distributions, channel representations, and the
// information measures used by every other module.  All logarithms are base 2
// (rates in bits) and 0*log(0) is defined as 0.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace netcap {

inline constexpr double kProbSumTol = 1e-12;  // construction-time mass tolerance
inline constexpr double kZeroProb = 1e-15;    // below this, treated as exact zero in entropy sums

// -p*log2(p) with the 0*log(0)=0 convention.
double nlog2(double p);

// Binary entropy in bits.
double binary_entropy(double p);

// Crossover combination p*q = p(1-q) + q(1-p).  Inputs must lie in [0,1].
double star(double p, double q);

// ---------------------------------------------------------------------------
// Distributions
// ---------------------------------------------------------------------------

struct Pmf {
    std::vector<std::string> labels;
    std::vector<double> probs;

    Pmf() = default;
    Pmf(std::vector<std::string> labels, std::vector<double> probs);

    static Pmf from_probs(std::vector<double> probs);  // labels "0","1",...
    static Pmf uniform(std::size_t n);

    std::size_t size() const { return probs.size(); }
};

struct Axis {
    std::string name;
    std::vector<std::string> labels;
};

// Dense joint distribution; `probs` is row-major over the axis order.
struct JointPmf {
    std::vector<Axis> axes;
    std::vector<double> probs;

    JointPmf() = default;
    JointPmf(std::vector<Axis> axes, std::vector<double> probs);

    std::size_t size() const { return probs.size(); }
    std::size_t axis_index(const std::string& name) const;
    std::vector<std::size_t> axis_indices(const std::vector<std::string>& names) const;

    // Marginal over the named axes, in the order they appear in this joint.
    JointPmf marginal(const std::vector<std::string>& keep) const;

    Pmf as_pmf() const;  // requires exactly one axis
};

double entropy(const Pmf& p);
double entropy(const JointPmf& p);

// Entropy of the marginal over a named axis group.
double group_entropy(const JointPmf& joint, const std::vector<std::string>& axes);

// I(A;B) in bits; axes outside A and B are marginalized out.
double mutual_information(const JointPmf& joint, const std::vector<std::string>& group_a,
                          const std::vector<std::string>& group_b);

// I(A;B|G) in bits.
double conditional_mi(const JointPmf& joint, const std::vector<std::string>& group_a,
                      const std::vector<std::string>& group_b,
                      const std::vector<std::string>& given);

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

enum class ChannelRole { P2P, BC2, MAC2, IC22 };

std::size_t role_input_count(ChannelRole role);
std::size_t role_output_count(ChannelRole role);
std::string role_name(ChannelRole role);

// Finite-alphabet memoryless channel: a stochastic transition tensor
// p(y-tuple | x-tuple) plus a role tag fixing the arity.
struct Dmc {
    ChannelRole role = ChannelRole::P2P;
    std::vector<std::vector<std::string>> input_alphabets;
    std::vector<std::vector<std::string>> output_alphabets;
    std::vector<double> transition;  // [in_flat * out_size + out_flat], input-tuple-major
    std::string name;

    Dmc() = default;
    Dmc(ChannelRole role, std::vector<std::vector<std::string>> inputs,
        std::vector<std::vector<std::string>> outputs, std::vector<double> transition,
        std::string name = "");

    std::size_t in_size() const;
    std::size_t out_size() const;
    double p(std::size_t in_flat, std::size_t out_flat) const {
        return transition[in_flat * out_size() + out_flat];
    }

    // Joint distribution of inputs and outputs under the given input law.
    // Axis names: P2P (X,Y); BC2 (X,Y1,Y2); MAC2 (X1,X2,Y); IC22 (X1,X2,Y1,Y2).
    JointPmf joint(const JointPmf& input) const;
    JointPmf joint(const Pmf& input) const;       // single-input roles
    JointPmf joint_product(const Pmf& x1, const Pmf& x2) const;  // two-input roles

    Pmf output_marginal(const JointPmf& input) const;
    Pmf output_marginal(const Pmf& input) const;

    static std::vector<std::string> input_axis_names(ChannelRole role);
    static std::vector<std::string> output_axis_names(ChannelRole role);

    // Common constructions.
    static Dmc bsc(double p);
    static Dmc bec(double eps);
    static Dmc noiseless(std::size_t n);
    static Dmc binary_adder_mac(double p);
    static Dmc bsc_bc_independent(double p1, double q2);  // receiver crossovers p1 and q2
    static Dmc bsc_bc_degraded(double p1, double p2);     // X -> Y1 (p1) -> Y2 (further p2)
};

// Closed-form Gaussian channel specs (the only continuous channels handled).
struct GaussianChannelSpec {
    enum class Kind { BC, MAC };
    Kind kind = Kind::BC;
    // BC: Y1 = a1*X + Z1, Y2 = a2*X + Z2, E X^2 <= P, Var Zk = Nk, corr rho,
    // with the receiver-order convention N1/a1^2 <= N2/a2^2.
    double P = 0, a1 = 1, a2 = 1, N1 = 0, N2 = 0, rho = 0;
    // MAC: Y = X1 + X2 + Z, powers P1 >= P2, Var Z = N.
    double P1 = 0, P2 = 0, N = 0;
    std::string name;

    static GaussianChannelSpec bc(double P, double a1, double a2, double N1, double N2,
                                  double rho, std::string name = "");
    static GaussianChannelSpec mac(double P1, double P2, double N, std::string name = "");
};

}  // namespace netcap
