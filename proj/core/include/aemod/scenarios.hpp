#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aemod/lp.hpp"
#include "aemod/model.hpp"

namespace aemod {
namespace scenarios {

enum class ShapeKind { uniform, gaussian, increasing, decreasing };

const char* to_string(ShapeKind kind);

/// Family of SoC / demand profiles. The monotone kinds are linear ramps
/// with a 3:1 max:min ratio; the gaussian kind is a discretized bell with
/// default center (n-1)/2 and default spread n/4. The generating parameters
/// are fixed here because only the family shapes matter for the studies.
struct DistShape {
    ShapeKind kind = ShapeKind::uniform;
    double mean = -1.0;    // gaussian center in class units; < 0 selects the default
    double spread = -1.0;  // gaussian spread in class units; <= 0 selects the default
};

DistShape shape_from_string(const std::string& name);

/// Length-n nonnegative vector with the given shape, scaled to target_sum.
std::vector<double> make_distribution(const DistShape& shape, int n, double target_sum);

enum class PolicyKind {
    optimal,
    always_charge,          // q = 0 everywhere: every vehicle charges one step
    always_charge_literal,  // q = 1 everywhere: the complementary reading
    equal_split,            // q = 0.5 everywhere
    explicit_q,
};

const char* to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(const std::string& name);

/// Fixed policies by kind; `optimal` needs a solved program. explicit_q is
/// built by the caller from a literal vector.
Policy make_policy(PolicyKind kind, int n, const lp::LpSolution* solution = nullptr);

struct SweepSpec {
    std::string sweep_id;
    double lambda_v = 0.0;
    double mu_c = 0.0;
    int c_points = 0;
    std::vector<int> n_values;
    std::vector<DistShape> p_shapes;
    std::vector<DistShape> c_shapes;
    std::vector<double> loads;  // total customer demand per grid point
    std::vector<PolicyKind> policies;
    std::optional<Policy> explicit_policy;  // used by PolicyKind::explicit_q
};

struct SweepRow {
    std::string sweep_id;
    int point = 0;  // grid-point index, shared by the policies evaluated there
    double lambda_v = 0.0;
    double mu_c = 0.0;
    int c_points = 0;
    int n = 0;
    double sum_lambda_c = 0.0;
    std::string p_shape;
    std::string c_shape;
    std::string policy;
    // NaN when no policy exists at this point; +inf max/avg when some class
    // is unstable under the policy.
    double r_star = std::numeric_limits<double>::quiet_NaN();
    double max_rt = std::numeric_limits<double>::quiet_NaN();
    double avg_rt = std::numeric_limits<double>::quiet_NaN();
    bool stable = false;  // every class and both charging queues stable
};

/// Evaluate the cross product n x p_shape x c_shape x load x policy in
/// deterministic declaration order. Infeasible or unstable points become
/// flagged rows, never errors.
std::vector<SweepRow> sweep(const SweepSpec& spec);

/// CSV with the documented header:
/// sweep_id,point,lambda_v,mu_c,C,n,sum_lambda_c,p_shape,c_shape,policy,
/// R_star,max_rt_min,avg_rt_min,stable
std::string to_csv(const std::vector<SweepRow>& rows);

}  // namespace scenarios
}  // namespace aemod
