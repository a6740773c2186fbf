#include "netcap/prob.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "netcap/errors.hpp"

namespace netcap {

double nlog2(double p) {
    if (p < kZeroProb) return 0.0;
    return -p * std::log2(p);
}

double binary_entropy(double p) { return nlog2(p) + nlog2(1.0 - p); }

double star(double p, double q) {
    if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
        throw ParseError("star: arguments must lie in [0,1]");
    return p + q - 2.0 * p * q;
}

// ---------------------------------------------------------------------------
// Pmf
// ---------------------------------------------------------------------------

static void check_mass(const std::vector<double>& probs, const char* what) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw ParseError(std::string(what) + ": negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kProbSumTol)
        throw ParseError(std::string(what) + ": probabilities sum to " + std::to_string(sum));
}

Pmf::Pmf(std::vector<std::string> labels_, std::vector<double> probs_)
    : labels(std::move(labels_)), probs(std::move(probs_)) {
    if (labels.size() != probs.size()) throw ParseError("Pmf: label/probability count mismatch");
    std::set<std::string> uniq(labels.begin(), labels.end());
    if (uniq.size() != labels.size()) throw ParseError("Pmf: duplicate labels");
    check_mass(probs, "Pmf");
}

Pmf Pmf::from_probs(std::vector<double> probs) {
    std::vector<std::string> labels(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) labels[i] = std::to_string(i);
    return Pmf(std::move(labels), std::move(probs));
}

Pmf Pmf::uniform(std::size_t n) {
    return from_probs(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// JointPmf
// ---------------------------------------------------------------------------

JointPmf::JointPmf(std::vector<Axis> axes_, std::vector<double> probs_)
    : axes(std::move(axes_)), probs(std::move(probs_)) {
    std::size_t expect = 1;
    std::set<std::string> names;
    for (const Axis& ax : axes) {
        if (ax.labels.empty()) throw ParseError("JointPmf: empty axis " + ax.name);
        if (!names.insert(ax.name).second) throw ParseError("JointPmf: duplicate axis " + ax.name);
        expect *= ax.labels.size();
    }
    if (probs.size() != expect) throw ParseError("JointPmf: tensor shape does not match axes");
    check_mass(probs, "JointPmf");
}

std::size_t JointPmf::axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < axes.size(); ++i)
        if (axes[i].name == name) return i;
    throw ParseError("JointPmf: no axis named " + name);
}

std::vector<std::size_t> JointPmf::axis_indices(const std::vector<std::string>& names) const {
    std::vector<std::size_t> out;
    out.reserve(names.size());
    for (const auto& n : names) out.push_back(axis_index(n));
    return out;
}

JointPmf JointPmf::marginal(const std::vector<std::string>& keep) const {
    std::vector<std::size_t> idx = axis_indices(keep);
    std::sort(idx.begin(), idx.end());
    if (std::adjacent_find(idx.begin(), idx.end()) != idx.end())
        throw ParseError("JointPmf: repeated axis in marginal");

    std::vector<Axis> new_axes;
    std::size_t new_size = 1;
    for (std::size_t i : idx) {
        new_axes.push_back(axes[i]);
        new_size *= axes[i].labels.size();
    }

    // Strides of each kept axis in the reduced tensor.
    std::vector<std::size_t> dims(axes.size()), strides(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) dims[i] = axes[i].labels.size();
    std::size_t s = 1;
    for (std::size_t k = idx.size(); k-- > 0;) {
        strides[idx[k]] = s;
        s *= dims[idx[k]];
    }

    std::vector<double> out(new_size, 0.0);
    std::vector<std::size_t> coord(axes.size(), 0);
    for (std::size_t flat = 0; flat < probs.size(); ++flat) {
        std::size_t pos = 0;
        for (std::size_t i : idx) pos += coord[i] * strides[i];
        out[pos] += probs[flat];
        for (std::size_t i = axes.size(); i-- > 0;) {
            if (++coord[i] < dims[i]) break;
            coord[i] = 0;
        }
    }
    // Marginal sums can drift by a few ulps; pass through without revalidation.
    JointPmf m;
    m.axes = std::move(new_axes);
    m.probs = std::move(out);
    return m;
}

Pmf JointPmf::as_pmf() const {
    if (axes.size() != 1) throw ParseError("JointPmf::as_pmf: not one-dimensional");
    Pmf p;
    p.labels = axes[0].labels;
    p.probs = probs;
    return p;
}

double entropy(const Pmf& p) {
    double h = 0.0;
    for (double q : p.probs) h += nlog2(q);
    return h;
}

double entropy(const JointPmf& p) {
    double h = 0.0;
    for (double q : p.probs) h += nlog2(q);
    return h;
}

double group_entropy(const JointPmf& joint, const std::vector<std::string>& axes) {
    return entropy(joint.marginal(axes));
}

static void check_disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b,
                           const char* what) {
    for (const auto& x : a)
        for (const auto& y : b)
            if (x == y) throw ParseError(std::string(what) + ": axis groups overlap on " + x);
}

double mutual_information(const JointPmf& joint, const std::vector<std::string>& group_a,
                          const std::vector<std::string>& group_b) {
    if (group_a.empty() || group_b.empty())
        throw ParseError("mutual_information: empty axis group");
    check_disjoint(group_a, group_b, "mutual_information");
    std::vector<std::string> both = group_a;
    both.insert(both.end(), group_b.begin(), group_b.end());
    return group_entropy(joint, group_a) + group_entropy(joint, group_b) -
           group_entropy(joint, both);
}

static std::vector<std::string> axis_union(std::initializer_list<const std::vector<std::string>*> groups) {
    std::vector<std::string> out;
    for (const auto* g : groups)
        for (const auto& name : *g)
            if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    return out;
}

double conditional_mi(const JointPmf& joint, const std::vector<std::string>& group_a,
                      const std::vector<std::string>& group_b,
                      const std::vector<std::string>& given) {
    if (group_a.empty() || group_b.empty())
        throw ParseError("conditional_mi: empty axis group");
    // The two information groups must be disjoint; either may overlap the
    // conditioning set (I(X;Y|X) is well defined and zero).
    check_disjoint(group_a, group_b, "conditional_mi");
    if (given.empty()) return mutual_information(joint, group_a, group_b);

    const auto ag = axis_union({&group_a, &given});
    const auto bg = axis_union({&group_b, &given});
    const auto abg = axis_union({&group_a, &group_b, &given});
    return group_entropy(joint, ag) + group_entropy(joint, bg) - group_entropy(joint, abg) -
           group_entropy(joint, given);
}

// ---------------------------------------------------------------------------
// Dmc
// ---------------------------------------------------------------------------

std::size_t role_input_count(ChannelRole role) {
    switch (role) {
        case ChannelRole::P2P: return 1;
        case ChannelRole::BC2: return 1;
        case ChannelRole::MAC2: return 2;
        case ChannelRole::IC22: return 2;
    }
    return 0;
}

std::size_t role_output_count(ChannelRole role) {
    switch (role) {
        case ChannelRole::P2P: return 1;
        case ChannelRole::BC2: return 2;
        case ChannelRole::MAC2: return 1;
        case ChannelRole::IC22: return 2;
    }
    return 0;
}

std::string role_name(ChannelRole role) {
    switch (role) {
        case ChannelRole::P2P: return "p2p";
        case ChannelRole::BC2: return "bc";
        case ChannelRole::MAC2: return "mac";
        case ChannelRole::IC22: return "ic";
    }
    return "?";
}

static std::size_t product_size(const std::vector<std::vector<std::string>>& alphabets) {
    std::size_t n = 1;
    for (const auto& a : alphabets) n *= a.size();
    return n;
}

Dmc::Dmc(ChannelRole role_, std::vector<std::vector<std::string>> inputs,
         std::vector<std::vector<std::string>> outputs, std::vector<double> transition_,
         std::string name_)
    : role(role_),
      input_alphabets(std::move(inputs)),
      output_alphabets(std::move(outputs)),
      transition(std::move(transition_)),
      name(std::move(name_)) {
    if (input_alphabets.size() != role_input_count(role) ||
        output_alphabets.size() != role_output_count(role))
        throw ParseError("Dmc: alphabet count does not match role " + role_name(role));
    for (const auto& a : input_alphabets)
        if (a.empty()) throw ParseError("Dmc: empty input alphabet");
    for (const auto& a : output_alphabets)
        if (a.empty()) throw ParseError("Dmc: empty output alphabet");
    const std::size_t ni = in_size(), no = out_size();
    if (transition.size() != ni * no) throw ParseError("Dmc: transition tensor has wrong size");
    for (std::size_t i = 0; i < ni; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < no; ++j) {
            const double v = transition[i * no + j];
            if (v < 0.0) throw ParseError("Dmc: negative transition probability in row " +
                                          std::to_string(i));
            sum += v;
        }
        if (std::abs(sum - 1.0) > kProbSumTol)
            throw ParseError("Dmc: row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
}

std::size_t Dmc::in_size() const { return product_size(input_alphabets); }
std::size_t Dmc::out_size() const { return product_size(output_alphabets); }

std::vector<std::string> Dmc::input_axis_names(ChannelRole role) {
    switch (role) {
        case ChannelRole::P2P: return {"X"};
        case ChannelRole::BC2: return {"X"};
        case ChannelRole::MAC2: return {"X1", "X2"};
        case ChannelRole::IC22: return {"X1", "X2"};
    }
    return {};
}

std::vector<std::string> Dmc::output_axis_names(ChannelRole role) {
    switch (role) {
        case ChannelRole::P2P: return {"Y"};
        case ChannelRole::BC2: return {"Y1", "Y2"};
        case ChannelRole::MAC2: return {"Y"};
        case ChannelRole::IC22: return {"Y1", "Y2"};
    }
    return {};
}

JointPmf Dmc::joint(const JointPmf& input) const {
    const std::size_t ni = in_size(), no = out_size();
    if (input.size() != ni) throw ParseError("Dmc::joint: input distribution has wrong size");

    std::vector<Axis> axes;
    const auto in_names = input_axis_names(role);
    const auto out_names = output_axis_names(role);
    for (std::size_t k = 0; k < input_alphabets.size(); ++k)
        axes.push_back({in_names[k], input_alphabets[k]});
    for (std::size_t k = 0; k < output_alphabets.size(); ++k)
        axes.push_back({out_names[k], output_alphabets[k]});

    std::vector<double> probs(ni * no);
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < no; ++j) probs[i * no + j] = input.probs[i] * p(i, j);
    return JointPmf(std::move(axes), std::move(probs));
}

JointPmf Dmc::joint(const Pmf& input) const {
    if (role_input_count(role) != 1) throw ParseError("Dmc::joint: role has two inputs");
    JointPmf in(std::vector<Axis>{{input_axis_names(role)[0], input_alphabets[0]}}, input.probs);
    return joint(in);
}

JointPmf Dmc::joint_product(const Pmf& x1, const Pmf& x2) const {
    if (role_input_count(role) != 2) throw ParseError("Dmc::joint_product: role has one input");
    std::vector<double> probs(x1.size() * x2.size());
    for (std::size_t i = 0; i < x1.size(); ++i)
        for (std::size_t j = 0; j < x2.size(); ++j)
            probs[i * x2.size() + j] = x1.probs[i] * x2.probs[j];
    const auto names = input_axis_names(role);
    JointPmf in(std::vector<Axis>{{names[0], input_alphabets[0]}, {names[1], input_alphabets[1]}},
                std::move(probs));
    return joint(in);
}

Pmf Dmc::output_marginal(const JointPmf& input) const {
    const std::size_t ni = in_size(), no = out_size();
    if (input.size() != ni) throw ParseError("Dmc::output_marginal: wrong input size");
    std::vector<double> out(no, 0.0);
    for (std::size_t i = 0; i < ni; ++i)
        for (std::size_t j = 0; j < no; ++j) out[j] += input.probs[i] * p(i, j);
    std::vector<std::string> labels;
    if (output_alphabets.size() == 1) {
        labels = output_alphabets[0];
    } else {
        for (const auto& a : output_alphabets[0])
            for (const auto& b : output_alphabets[1]) labels.push_back(a + "," + b);
    }
    return Pmf(std::move(labels), std::move(out));
}

Pmf Dmc::output_marginal(const Pmf& input) const {
    JointPmf in(std::vector<Axis>{{"X", input_alphabets[0]}}, input.probs);
    return output_marginal(in);
}

Dmc Dmc::bsc(double p) {
    return Dmc(ChannelRole::P2P, {{"0", "1"}}, {{"0", "1"}}, {1 - p, p, p, 1 - p}, "bsc");
}

Dmc Dmc::bec(double eps) {
    return Dmc(ChannelRole::P2P, {{"0", "1"}}, {{"0", "e", "1"}},
               {1 - eps, eps, 0, 0, eps, 1 - eps}, "bec");
}

Dmc Dmc::noiseless(std::size_t n) {
    std::vector<std::string> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::to_string(i);
    std::vector<double> t(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
    return Dmc(ChannelRole::P2P, {a}, {a}, std::move(t), "noiseless");
}

Dmc Dmc::binary_adder_mac(double p) {
    // Y = X1 xor X2 xor Z, EZ = p; inputs tuple-major (x1,x2).
    std::vector<double> t;
    for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2) {
            const int s = x1 ^ x2;
            t.push_back(s == 0 ? 1 - p : p);  // y = 0
            t.push_back(s == 0 ? p : 1 - p);  // y = 1
        }
    return Dmc(ChannelRole::MAC2, {{"0", "1"}, {"0", "1"}}, {{"0", "1"}}, std::move(t),
               "binary_adder_mac");
}

Dmc Dmc::bsc_bc_independent(double p1, double q2) {
    // Y1 = X xor Z1 (crossover p1), Y2 = X xor Z2 (crossover q2), Z1 and Z2 independent.
    std::vector<double> t;
    for (int x = 0; x < 2; ++x)
        for (int y1 = 0; y1 < 2; ++y1)
            for (int y2 = 0; y2 < 2; ++y2) {
                const double a = (y1 == x) ? 1 - p1 : p1;
                const double b = (y2 == x) ? 1 - q2 : q2;
                t.push_back(a * b);
            }
    return Dmc(ChannelRole::BC2, {{"0", "1"}}, {{"0", "1"}, {"0", "1"}}, std::move(t),
               "bsc_bc_independent");
}

Dmc Dmc::bsc_bc_degraded(double p1, double p2) {
    // Y1 = X xor Z1 (p1), Y2 = Y1 xor Z2 (p2).
    std::vector<double> t;
    for (int x = 0; x < 2; ++x)
        for (int y1 = 0; y1 < 2; ++y1)
            for (int y2 = 0; y2 < 2; ++y2) {
                const double a = (y1 == x) ? 1 - p1 : p1;
                const double b = (y2 == y1) ? 1 - p2 : p2;
                t.push_back(a * b);
            }
    return Dmc(ChannelRole::BC2, {{"0", "1"}}, {{"0", "1"}, {"0", "1"}}, std::move(t),
               "bsc_bc_degraded");
}

// ---------------------------------------------------------------------------
// GaussianChannelSpec
// ---------------------------------------------------------------------------

GaussianChannelSpec GaussianChannelSpec::bc(double P, double a1, double a2, double N1, double N2,
                                            double rho, std::string name) {
    if (P <= 0 || N1 <= 0 || N2 <= 0) throw ParseError("gaussian_bc: P, N1, N2 must be > 0");
    if (a1 == 0 || a2 == 0) throw ParseError("gaussian_bc: zero gain");
    if (rho < -1 || rho > 1) throw ParseError("gaussian_bc: |rho| must be <= 1");
    if (N1 / (a1 * a1) > N2 / (a2 * a2) + 1e-15)
        throw ParseError("gaussian_bc: requires N1/a1^2 <= N2/a2^2 (receiver order)");
    GaussianChannelSpec s;
    s.kind = Kind::BC;
    s.P = P; s.a1 = a1; s.a2 = a2; s.N1 = N1; s.N2 = N2; s.rho = rho;
    s.name = std::move(name);
    return s;
}

GaussianChannelSpec GaussianChannelSpec::mac(double P1, double P2, double N, std::string name) {
    if (P1 <= 0 || P2 <= 0 || N <= 0) throw ParseError("gaussian_mac: P1, P2, N must be > 0");
    if (P1 < P2) throw ParseError("gaussian_mac: requires P1 >= P2");
    GaussianChannelSpec s;
    s.kind = Kind::MAC;
    s.P1 = P1; s.P2 = P2; s.N = N;
    s.name = std::move(name);
    return s;
}

}  // namespace netcap
