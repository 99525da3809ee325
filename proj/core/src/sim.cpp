#include "aemod/sim.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <sstream>

namespace aemod {
namespace sim {

const char* to_string(Mode mode) {
    return mode == Mode::abstract ? "abstract" : "physical";
}

void SimConfig::validate() const {
    zone.validate();
    policy.validate();
    if (policy.q.size() != static_cast<size_t>(zone.n_classes))
        throw ConfigError("policy length does not match n_classes");
    if (!(warmup >= 0.0) || !(horizon > warmup))
        throw ConfigError("horizon must exceed warmup and warmup must be >= 0");
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One deterministic generator per model process, derived from the master
// seed by stream id, so perturbing one rate leaves the other streams'
// sequences untouched (paired-seed policy comparisons stay low-variance).
class Rng {
  public:
    Rng() = default;
    Rng(uint64_t master, uint64_t stream_id) {
        uint64_t s = master ^ (0xd1342543de82ef95ULL * (stream_id + 1));
        state_ = splitmix64(s);
        (void)next();  // decorrelate nearby stream ids
    }

    double uniform() {  // [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }
    double exponential(double rate) {
        return -std::log1p(-uniform()) / rate;
    }

  private:
    uint64_t next() {
        return splitmix64(state_);
    }
    uint64_t state_ = 0;
};

// Stream ids.
constexpr uint64_t kVehicleArrivals = 1;
constexpr uint64_t kClassDraw = 2;
constexpr uint64_t kDecisionDraw = 3;
constexpr uint64_t kFullService = 4;
constexpr uint64_t kPoolService = 5;
constexpr uint64_t kCustomerBase = 1000;  // + class index
constexpr uint64_t kStationBase = 2000;   // + class index (abstract services)

enum EventKind : int {
    kCustomerArrival = 0,
    kVehicleArrival = 1,
    kServiceDone = 2,
    kPartialDone = 3,
    kFullDone = 4,
};

// Arrivals sort before completions at equal timestamps, insertion order
// breaks the remaining ties. Reproducibility depends on this ordering.
struct Event {
    double time;
    int rank;  // 0 arrivals, 1 completions
    uint64_t seq;
    EventKind kind;
    int tag;  // class / station / charge target

    bool operator>(const Event& other) const {
        if (time != other.time) return time > other.time;
        if (rank != other.rank) return rank > other.rank;
        return seq > other.seq;
    }
};

class EventQueue {
  public:
    void push(double time, EventKind kind, int tag) {
        const int rank = (kind == kCustomerArrival || kind == kVehicleArrival) ? 0 : 1;
        heap_.push(Event{time, rank, seq_++, kind, tag});
    }
    bool empty() const { return heap_.empty(); }
    Event pop() {
        Event e = heap_.top();
        heap_.pop();
        return e;
    }

  private:
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap_;
    uint64_t seq_ = 0;
};

// Response-time accumulator: running mean, max, fixed-width histogram for
// the p95 estimate, and 20 time-batch sums for the confidence halfwidth.
class ResponseAccum {
  public:
    static constexpr int kBatches = 20;
    static constexpr double kBucketWidth = 0.05;  // minutes
    static constexpr int kBuckets = 40000;        // 2000 min span + overflow

    ResponseAccum() : hist_(kBuckets + 1, 0) {}

    void add(double rt, double request_time, double warmup, double horizon) {
        ++count_;
        sum_ += rt;
        max_ = std::max(max_, rt);
        const int b = std::min(kBuckets, static_cast<int>(rt / kBucketWidth));
        ++hist_[static_cast<size_t>(b)];
        const double span = horizon - warmup;
        int batch = static_cast<int>((request_time - warmup) / span * kBatches);
        batch = std::clamp(batch, 0, kBatches - 1);
        batch_sum_[static_cast<size_t>(batch)] += rt;
        ++batch_count_[static_cast<size_t>(batch)];
    }

    long long count() const { return count_; }
    double mean() const { return count_ ? sum_ / static_cast<double>(count_) : kNaN; }
    double max() const { return count_ ? max_ : kNaN; }

    double p95() const {
        if (!count_) return kNaN;
        const long long target = static_cast<long long>(std::ceil(0.95 * static_cast<double>(count_)));
        long long cum = 0;
        for (size_t b = 0; b < hist_.size(); ++b) {
            cum += hist_[b];
            if (cum >= target)
                return b >= kBuckets ? max_ : (static_cast<double>(b) + 1.0) * kBucketWidth;
        }
        return max_;
    }

    // Batch-means 95% halfwidth (t quantile for 19 dof). NaN unless every
    // batch saw at least one observation.
    double ci_halfwidth() const {
        double means[kBatches];
        for (int i = 0; i < kBatches; ++i) {
            if (batch_count_[static_cast<size_t>(i)] == 0) return kNaN;
            means[i] = batch_sum_[static_cast<size_t>(i)] /
                       static_cast<double>(batch_count_[static_cast<size_t>(i)]);
        }
        double m = 0.0;
        for (double v : means) m += v;
        m /= kBatches;
        double var = 0.0;
        for (double v : means) var += (v - m) * (v - m);
        var /= (kBatches - 1);
        return 2.093 * std::sqrt(var / kBatches);
    }

  private:
    long long count_ = 0;
    double sum_ = 0.0;
    double max_ = 0.0;
    std::vector<long long> hist_;
    std::array<double, kBatches> batch_sum_{};
    std::array<long long, kBatches> batch_count_{};
};

// Time-weighted queue-length tracker with a four-window trend test: a queue
// is flagged as diverging when the window averages increase monotonically
// and the last one is both large and well above the first.
class QueueTrack {
  public:
    void init(double warmup, double horizon) {
        warmup_ = warmup;
        horizon_ = horizon;
        quarter_ = (horizon - warmup) / 4.0;
    }

    void advance(double from, double to, long long level) {
        max_ = std::max(max_, level);
        const double lo = std::max(from, warmup_);
        const double hi = std::min(to, horizon_);
        if (hi <= lo) return;
        double t = lo;
        while (t < hi) {
            int w = std::min(3, static_cast<int>((t - warmup_) / quarter_));
            const double w_end = warmup_ + quarter_ * (w + 1);
            const double seg = std::min(hi, w_end) - t;
            area_[static_cast<size_t>(w)] += seg * static_cast<double>(level);
            t += seg;
        }
    }

    long long max_level() const { return max_; }

    double mean() const {
        return (area_[0] + area_[1] + area_[2] + area_[3]) / (horizon_ - warmup_);
    }

    bool diverging() const {
        double avg[4];
        for (int i = 0; i < 4; ++i) avg[i] = area_[static_cast<size_t>(i)] / quarter_;
        const bool monotone = avg[0] < avg[1] && avg[1] < avg[2] && avg[2] < avg[3];
        return monotone && avg[3] > 10.0 && avg[3] > 2.0 * avg[0];
    }

  private:
    double warmup_ = 0.0, horizon_ = 0.0, quarter_ = 0.0;
    std::array<double, 4> area_{};
    long long max_ = 0;
};

// Busy-time integral for utilization figures.
class BusyTrack {
  public:
    void init(double warmup, double horizon) {
        warmup_ = warmup;
        horizon_ = horizon;
    }
    void advance(double from, double to, double busy) {
        const double lo = std::max(from, warmup_);
        const double hi = std::min(to, horizon_);
        if (hi > lo) area_ += (hi - lo) * busy;
    }
    double mean() const { return area_ / (horizon_ - warmup_); }

  private:
    double warmup_ = 0.0, horizon_ = 0.0, area_ = 0.0;
};

struct ClassState {
    ResponseAccum response;
    QueueTrack queue;
    std::deque<double> waiting;  // abstract: arrival times in system;
                                 // physical: pending request times
};

int draw_class(Rng& rng, const std::vector<double>& p) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        cum += p[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(p.size()) - 1;
}

SimReport run_abstract(const SimConfig& config) {
    const int n = config.zone.n_classes;
    const DerivedRates rates = derive_rates(config.zone, config.policy);

    EventQueue events;
    std::vector<ClassState> cls(static_cast<size_t>(n + 1));
    std::vector<Rng> arrival_rng(static_cast<size_t>(n + 1));
    std::vector<Rng> service_rng(static_cast<size_t>(n + 1));
    for (int i = 1; i <= n; ++i) {
        cls[static_cast<size_t>(i)].queue.init(config.warmup, config.horizon);
        arrival_rng[static_cast<size_t>(i)] = Rng(config.seed, kCustomerBase + static_cast<uint64_t>(i));
        service_rng[static_cast<size_t>(i)] = Rng(config.seed, kStationBase + static_cast<uint64_t>(i));
        const double lc = config.zone.customer_rate(i);
        if (lc > 0.0) events.push(arrival_rng[static_cast<size_t>(i)].exponential(lc), kCustomerArrival, i);
    }

    double now = 0.0;
    while (!events.empty()) {
        const Event e = events.pop();
        if (e.time > config.horizon) break;
        for (int i = 1; i <= n; ++i)
            cls[static_cast<size_t>(i)].queue.advance(now, e.time,
                                                      static_cast<long long>(cls[static_cast<size_t>(i)].waiting.size()));
        now = e.time;
        const int i = e.tag;
        auto& st = cls[static_cast<size_t>(i)];
        if (e.kind == kCustomerArrival) {
            st.waiting.push_back(now);
            const double lc = config.zone.customer_rate(i);
            events.push(now + arrival_rng[static_cast<size_t>(i)].exponential(lc), kCustomerArrival, i);
            if (st.waiting.size() == 1 && rates.class_rate(i) > 0.0)
                events.push(now + service_rng[static_cast<size_t>(i)].exponential(rates.class_rate(i)),
                            kServiceDone, i);
        } else {  // service completion
            const double arrived = st.waiting.front();
            st.waiting.pop_front();
            if (arrived >= config.warmup)
                st.response.add(now - arrived, arrived, config.warmup, config.horizon);
            if (!st.waiting.empty())
                events.push(now + service_rng[static_cast<size_t>(i)].exponential(rates.class_rate(i)),
                            kServiceDone, i);
        }
    }
    for (int i = 1; i <= n; ++i)
        cls[static_cast<size_t>(i)].queue.advance(now, config.horizon,
                                                  static_cast<long long>(cls[static_cast<size_t>(i)].waiting.size()));

    SimReport report;
    report.mode = Mode::abstract;
    report.seed = config.seed;
    report.horizon = config.horizon;
    report.warmup = config.warmup;
    for (int i = 1; i <= n; ++i) {
        const auto& st = cls[static_cast<size_t>(i)];
        ClassStats out;
        out.cls = i;
        out.served = st.response.count();
        out.mean_rt = st.response.mean();
        out.p95_rt = st.response.p95();
        out.ci_halfwidth = st.response.ci_halfwidth();
        out.max_rt = st.response.max();
        out.mean_in_system = st.queue.mean();
        out.max_queue = st.queue.max_level();
        out.diverging = st.queue.diverging();
        report.per_class.push_back(out);
    }
    return report;
}

SimReport run_physical(const SimConfig& config) {
    const int n = config.zone.n_classes;
    const auto& p = config.zone.p;
    const auto& q = config.policy.q;
    const double partial_rate = static_cast<double>(n) * config.zone.mu_c;

    EventQueue events;
    Rng vehicle_rng(config.seed, kVehicleArrivals);
    Rng class_rng(config.seed, kClassDraw);
    Rng decision_rng(config.seed, kDecisionDraw);
    Rng full_rng(config.seed, kFullService);
    Rng pool_rng(config.seed, kPoolService);
    std::vector<Rng> customer_rng(static_cast<size_t>(n + 1));
    for (int i = 1; i <= n; ++i)
        customer_rng[static_cast<size_t>(i)] = Rng(config.seed, kCustomerBase + static_cast<uint64_t>(i));

    std::vector<ClassState> cls(static_cast<size_t>(n + 1));
    std::vector<long long> parked(static_cast<size_t>(n + 1), 0);
    for (int i = 1; i <= n; ++i) cls[static_cast<size_t>(i)].queue.init(config.warmup, config.horizon);

    int pool_busy = 0;
    std::deque<int> pool_queue;  // charge targets waiting for a free point
    bool full_busy = false;
    long long full_queue = 0;

    QueueTrack pool_track, full_track;
    BusyTrack pool_busy_track, full_busy_track;
    pool_track.init(config.warmup, config.horizon);
    full_track.init(config.warmup, config.horizon);
    pool_busy_track.init(config.warmup, config.horizon);
    full_busy_track.init(config.warmup, config.horizon);

    SimReport report;
    report.mode = Mode::physical;
    report.seed = config.seed;
    report.horizon = config.horizon;
    report.warmup = config.warmup;

    double now = 0.0;

    auto respond = [&](int i, double request_time, double t) {
        ++report.vehicles_dispatched;
        if (request_time >= config.warmup)
            cls[static_cast<size_t>(i)].response.add(t - request_time, request_time, config.warmup,
                                                     config.horizon);
    };
    auto park = [&](int i, double t) {
        auto& st = cls[static_cast<size_t>(i)];
        if (!st.waiting.empty()) {
            const double request_time = st.waiting.front();
            st.waiting.pop_front();
            respond(i, request_time, t);
        } else {
            ++parked[static_cast<size_t>(i)];
        }
    };
    auto pool_enqueue = [&](int target, double t) {
        if (pool_busy < config.zone.c_points) {
            ++pool_busy;
            events.push(t + pool_rng.exponential(partial_rate), kPartialDone, target);
        } else {
            pool_queue.push_back(target);
        }
    };

    events.push(vehicle_rng.exponential(config.zone.lambda_v), kVehicleArrival, 0);
    for (int i = 1; i <= n; ++i) {
        const double lc = config.zone.customer_rate(i);
        if (lc > 0.0) events.push(customer_rng[static_cast<size_t>(i)].exponential(lc), kCustomerArrival, i);
    }

    while (!events.empty()) {
        const Event e = events.pop();
        if (e.time > config.horizon) break;
        for (int i = 1; i <= n; ++i)
            cls[static_cast<size_t>(i)].queue.advance(now, e.time,
                                                      static_cast<long long>(cls[static_cast<size_t>(i)].waiting.size()));
        pool_track.advance(now, e.time, static_cast<long long>(pool_queue.size()));
        full_track.advance(now, e.time, full_queue);
        pool_busy_track.advance(now, e.time, static_cast<double>(pool_busy));
        full_busy_track.advance(now, e.time, full_busy ? 1.0 : 0.0);
        now = e.time;

        switch (e.kind) {
            case kVehicleArrival: {
                ++report.vehicles_arrived;
                events.push(now + vehicle_rng.exponential(config.zone.lambda_v), kVehicleArrival, 0);
                const int k = draw_class(class_rng, p);
                const double u = decision_rng.uniform();
                if (k == 0) {
                    if (u < q[0]) {  // full charge, emerges as class n
                        if (!full_busy) {
                            full_busy = true;
                            events.push(now + full_rng.exponential(config.zone.mu_c), kFullDone, 0);
                        } else {
                            ++full_queue;
                        }
                    } else {
                        pool_enqueue(1, now);
                    }
                } else if (u < q[static_cast<size_t>(k)]) {
                    park(k, now);  // direct dispatch pool
                } else {
                    pool_enqueue(k + 1, now);  // one class worth of charge
                }
                break;
            }
            case kCustomerArrival: {
                const int i = e.tag;
                ++report.customers_arrived;
                events.push(now + customer_rng[static_cast<size_t>(i)].exponential(config.zone.customer_rate(i)),
                            kCustomerArrival, i);
                if (parked[static_cast<size_t>(i)] > 0) {
                    --parked[static_cast<size_t>(i)];
                    respond(i, now, now);
                } else {
                    cls[static_cast<size_t>(i)].waiting.push_back(now);
                }
                break;
            }
            case kPartialDone: {
                park(e.tag, now);
                if (!pool_queue.empty()) {
                    const int target = pool_queue.front();
                    pool_queue.pop_front();
                    events.push(now + pool_rng.exponential(partial_rate), kPartialDone, target);
                } else {
                    --pool_busy;
                }
                break;
            }
            case kFullDone: {
                park(n, now);
                if (full_queue > 0) {
                    --full_queue;
                    events.push(now + full_rng.exponential(config.zone.mu_c), kFullDone, 0);
                } else {
                    full_busy = false;
                }
                break;
            }
            default:
                assert(false);
        }
    }
    for (int i = 1; i <= n; ++i)
        cls[static_cast<size_t>(i)].queue.advance(now, config.horizon,
                                                  static_cast<long long>(cls[static_cast<size_t>(i)].waiting.size()));
    pool_track.advance(now, config.horizon, static_cast<long long>(pool_queue.size()));
    full_track.advance(now, config.horizon, full_queue);
    pool_busy_track.advance(now, config.horizon, static_cast<double>(pool_busy));
    full_busy_track.advance(now, config.horizon, full_busy ? 1.0 : 0.0);

    for (int i = 1; i <= n; ++i) {
        const auto& st = cls[static_cast<size_t>(i)];
        ClassStats out;
        out.cls = i;
        out.served = st.response.count();
        out.mean_rt = st.response.mean();
        out.p95_rt = st.response.p95();
        out.ci_halfwidth = st.response.ci_halfwidth();
        out.max_rt = st.response.max();
        out.mean_in_system = st.queue.mean();
        out.max_queue = st.queue.max_level();
        out.diverging = st.queue.diverging();
        report.per_class.push_back(out);
        report.vehicles_parked_end += parked[static_cast<size_t>(i)];
    }
    report.util_partial = pool_busy_track.mean() / static_cast<double>(config.zone.c_points);
    report.util_full = full_busy_track.mean();
    report.pool_max_queue = pool_track.max_level();
    report.pool_diverging = pool_track.diverging();
    report.full_max_queue = full_track.max_level();
    report.full_diverging = full_track.diverging();
    report.vehicles_charging_end =
        pool_busy + static_cast<long long>(pool_queue.size()) + (full_busy ? 1 : 0) + full_queue;
    return report;
}

}  // namespace

SimReport run(const SimConfig& config) {
    config.validate();
    return config.mode == Mode::abstract ? run_abstract(config) : run_physical(config);
}

std::vector<ValidationRow> validate_against_formula(const SimReport& report,
                                                    const ZoneConfig& zone, const Policy& policy,
                                                    double rel_tol) {
    if (report.mode != Mode::abstract)
        throw ConfigError("mode mismatch: formula validation applies to abstract-mode reports only");
    const DerivedRates rates = derive_rates(zone, policy);
    std::vector<ValidationRow> rows;
    for (const auto& st : report.per_class) {
        const double margin = rates.class_rate(st.cls) - zone.customer_rate(st.cls);
        if (!(margin > 0.0)) {
            std::ostringstream os;
            os << "unstable class " << st.cls << " in validation";
            throw ConfigError(os.str());
        }
        ValidationRow row;
        row.cls = st.cls;
        row.analytic = 1.0 / margin;
        row.empirical = st.mean_rt;
        row.rel_err = std::abs(row.empirical - row.analytic) / row.analytic;
        row.pass = row.rel_err <= rel_tol;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sim
}  // namespace aemod
