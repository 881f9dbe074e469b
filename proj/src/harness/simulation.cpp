#include "ptpdelay/harness/simulation.hpp"

#include "ptpdelay/error.hpp"
#include "ptpdelay/guard/countermeasures.hpp"
#include "ptpdelay/net/encryption.hpp"
#include "ptpdelay/net/observe.hpp"
#include "ptpdelay/ptp/engine.hpp"
#include "ptpdelay/ptp/servo.hpp"
#include "ptpdelay/sim/event_loop.hpp"
#include "ptpdelay/sim/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

namespace ptpdelay::harness
{

namespace
{

using net::Direction;
using ptp::MessageKind;

// Stream ids for mix_seed, one per random consumer.
enum Stream : std::uint64_t
{
    kMasterClock = 1,
    kSlaveClock = 2,
    kLink = 3,
    kNoise = 4,
    kTiming = 5,
    kCoverMs = 6,
    kCoverSm = 7,
};

struct Flight
{
    net::Envelope env;
    std::optional<ptp::PtpMessage> msg;
    Duration attack{};
    std::optional<SimTime> arrival;
    net::DelayBreakdown parts;
    bool replay_ok = true;
};

std::string fmt_double(double v)
{
    std::ostringstream o;
    o.precision(6);
    o << std::fixed << v;
    return o.str();
}

class Simulation
{
public:
    explicit Simulation(const Scenario& s)
        : s_(s),
          scheme_(net::EncryptionScheme::by_name(s.encryption)),
          master_clock_(s.master.build(mix_seed(s.seed, kMasterClock))),
          slave_clock_(s.slave.build(mix_seed(s.seed, kSlaveClock))),
          lags_(s.guard.timing.active() ? guard::randomize_timing(s.engine, timing_with_seed(s)) : ptp::fixed_lags(s.engine)),
          master_(s.engine, master_clock_, lags_),
          slave_(s.engine, slave_clock_, lags_),
          link_(link_profile(s), mix_seed(s.seed, kLink)),
          gate_(s.guard.rtd_max),
          adversary_(adversary::AdversaryConfig{s.attack.build(), s.attack.classifier, s.attack.arm_threshold, {}},
                     [this](net::EnvelopeHandle h) -> std::optional<MessageKind> {
                         const auto& f = flights_.at(h.id);
                         return f.msg ? std::optional<MessageKind>(f.msg->kind) : std::nullopt;
                     }),
          cover_rng_{Rng(mix_seed(s.seed, kCoverMs)), Rng(mix_seed(s.seed, kCoverSm))}
    {
        servo_.config = s.servo;
        noise_ = s.noise;
        noise_.seed = mix_seed(s.seed, kNoise ^ (s.noise.seed << 8));
        if (s.guard.replay)
        {
            replay_.emplace_back(*s.guard.replay);
            replay_.emplace_back(*s.guard.replay);
        }
    }

    RunResult run()
    {
        const SimTime horizon = SimTime::from_duration(s_.duration);
        schedule_sync(0);
        schedule_announce(0);
        if (s_.cover.rate_ms > 0)
        {
            schedule_cover(Direction::master_to_slave, SimTime{});
        }
        if (s_.cover.rate_sm > 0)
        {
            schedule_cover(Direction::slave_to_master, SimTime{});
        }
        const auto& plan = adversary_.plan();
        if (plan.start <= horizon)
        {
            loop_.schedule(plan.start, [this] { arm(); });
        }
        loop_.run_until(horizon);
        return finish();
    }

private:
    static guard::TimingRandomization timing_with_seed(const Scenario& s)
    {
        auto t = s.guard.timing;
        t.seed = mix_seed(s.seed, kTiming ^ (t.seed << 8));
        return t;
    }

    static net::LinkProfile link_profile(const Scenario& s)
    {
        auto l = s.link;
        l.jitter = s.jitter.build();
        return l;
    }

    bool within(SimTime t) const { return t <= SimTime::from_duration(s_.duration); }

    // ---- traffic sources --------------------------------------------------

    void schedule_sync(std::uint64_t seq)
    {
        const SimTime at = master_.sync_time(seq);
        if (!within(at))
        {
            return;
        }
        loop_.schedule(at, [this, seq] {
            for (const auto& e : master_.on_sync_tick(loop_.now(), seq))
            {
                emit(e, Direction::master_to_slave);
            }
            schedule_sync(seq + 1);
        });
    }

    void schedule_announce(std::uint64_t n)
    {
        const SimTime at = master_.announce_time(n);
        if (!within(at))
        {
            return;
        }
        loop_.schedule(at, [this, n] {
            emit(master_.on_announce_tick(loop_.now()), Direction::master_to_slave);
            schedule_announce(n + 1);
        });
    }

    void schedule_cover(Direction d, SimTime from)
    {
        const double rate = d == Direction::master_to_slave ? s_.cover.rate_ms : s_.cover.rate_sm;
        auto& rng = cover_rng_[net::index(d)];
        const double gap_s = rng.exponential(rate);
        const auto gap = Duration(static_cast<std::int64_t>(std::ceil(gap_s * 1e9)));
        const SimTime at = from + gap;
        if (!within(at))
        {
            return;
        }
        const auto len = static_cast<std::uint32_t>(rng.uniform_int(s_.cover.len_lo, s_.cover.len_hi));
        loop_.schedule(at, [this, d, at, len] {
            send(d, std::nullopt, len);
            schedule_cover(d, at);
        });
    }

    void emit(const ptp::Emission& e, Direction d)
    {
        if (e.send_at == loop_.now())
        {
            send(d, e.msg, ptp::plain_length(e.msg.kind));
            return;
        }
        loop_.schedule(e.send_at, [this, e, d] { send(d, e.msg, ptp::plain_length(e.msg.kind)); });
    }

    // ---- tunnel -----------------------------------------------------------

    void send(Direction d, std::optional<ptp::PtpMessage> msg, std::uint32_t plain)
    {
        Flight f;
        f.env.id = flights_.size();
        f.env.payload_tag = msg ? static_cast<std::uint32_t>(msg->kind) + 1 : 0;
        f.env.plain_length = plain;
        f.env.wire_length = guard::apply_padding(plain, s_.guard.padding, scheme_);
        f.env.send_time = loop_.now();
        f.env.direction = d;
        f.env.seq = tunnel_seq_[net::index(d)]++;
        f.msg = std::move(msg);
        flights_.push_back(std::move(f));
        const std::uint64_t id = flights_.size() - 1;
        loop_.schedule_after(s_.link.tap_offset(d), [this, id] { on_tap(id); });
    }

    void on_tap(std::uint64_t id)
    {
        auto& f = flights_[id];
        const net::Observation obs{loop_.now(), f.env.wire_length, f.env.direction};
        tapped_.push_back({obs, f.msg ? std::optional<MessageKind>(f.msg->kind) : std::nullopt, f.msg ? f.msg->seq : 0});

        const Duration delay = adversary_.on_packet(obs, f.env.handle());
        const auto delivery = link_.transmit(f.env, delay);
        auto& g = flights_[id];
        g.attack = delay;
        g.parts = delivery.parts;
        g.arrival = delivery.arrival;
        if (g.arrival && within(*g.arrival))
        {
            loop_.schedule(*g.arrival, [this, id] { on_delivery(id); });
        }
    }

    void on_delivery(std::uint64_t id)
    {
        auto& f = flights_[id];
        const auto d = f.env.direction;
        if (!replay_.empty() && !replay_[net::index(d)].accept(f.env.seq))
        {
            f.replay_ok = false;
            ++replay_rejected_;
            if (f.msg)
            {
                ++replay_rejected_ptp_;
            }
            return;
        }
        if (!f.msg)
        {
            return;
        }
        const ptp::PtpMessage msg = *f.msg;
        if (d == Direction::master_to_slave)
        {
            if (msg.kind == MessageKind::sync)
            {
                sync_flight_[msg.seq] = id;
            }
            const auto out = slave_.on_message(loop_.now(), msg);
            if (out.delay_req_at)
            {
                const std::uint64_t seq = out.delay_req_seq;
                const SimTime at = *out.delay_req_at;
                auto fire = [this, seq] {
                    if (auto req = slave_.send_delay_req(loop_.now(), seq))
                    {
                        send(Direction::slave_to_master, *req, ptp::plain_length(req->kind));
                    }
                };
                if (at == loop_.now())
                {
                    fire();
                }
                else
                {
                    loop_.schedule(at, fire);
                }
            }
            if (out.completed)
            {
                process_cycle(*out.completed);
            }
        }
        else if (msg.kind == MessageKind::delay_req)
        {
            delayreq_flight_[msg.seq] = id;
            emit(master_.on_delay_req(loop_.now(), msg), Direction::master_to_slave);
        }
    }

    // ---- attack -----------------------------------------------------------

    void arm()
    {
        const auto& plan = adversary_.plan();
        if (!plan.needs_classifier() || s_.attack.classifier == adversary::ClassifierMode::oracle)
        {
            return;
        }
        std::vector<net::Observation> real;
        real.reserve(tapped_.size());
        for (const auto& t : tapped_)
        {
            real.push_back(t.obs);
        }
        const auto seen = net::with_noise(real, noise_, s_.noise_mode, 0, net::bin_of(loop_.now()));
        adversary_.arm(seen);
    }

    // ---- per-cycle analysis ----------------------------------------------

    Duration offset_at(SimTime t) const { return slave_clock_.local_time(t) - master_clock_.local_time(t); }

    void process_cycle(const ptp::SyncCycle& c)
    {
        const SimTime now = loop_.now();
        SyncRecord rec;
        rec.at = now;
        rec.seq = c.seq;
        rec.rtd = ptp::compute_rtd(c);
        rec.measured = ptp::compute_offset(c);
        rec.true_offset = offset_at(now);

        const bool accepted = gate_.check(c, now) == guard::GateDecision::accept;
        std::optional<Duration> midpoint;
        if (s_.guard.owd)
        {
            const auto& k = *s_.guard.owd;
            BoundRecord b;
            b.at = now;
            b.seq = c.seq;
            b.bound = guard::bound_offset(c, k);
            b.midpoint = guard::midpoint_offset(c, k);
            b.residual = guard::residual_uncertainty(c, k);
            b.true_offset = rec.true_offset;
            b.accepted = accepted;
            midpoint = b.midpoint;
            if (accepted)
            {
                ++bound_cycles_;
                if (!b.bound.contains(b.true_offset))
                {
                    ++bound_violations_;
                }
                if (abs(b.true_offset - b.midpoint) > b.residual)
                {
                    ++midpoint_violations_;
                }
                if (s_.guard.rtd_max)
                {
                    const guard::SystemBoundParams p{*s_.guard.rtd_max, s_.guard.t_interval, s_.guard.rho};
                    if (b.residual > guard::system_half_width(p, k))
                    {
                        ++system_bound_violations_;
                    }
                }
            }
            bounds_.push_back(b);
            if (c.t_s6)
            {
                const auto rt = guard::round_trip_check(c, k, s_.engine.delayresp_lag, s_.guard.suspicion_factor);
                if (rt.suspicious)
                {
                    ++suspicious_;
                }
            }
        }

        record_oracle(c, now);

        if (accepted && s_.servo.enabled)
        {
            const Duration input = s_.servo_input == ServoInput::midpoint && midpoint ? *midpoint : rec.measured;
            const auto action = ptp::servo_apply(servo_, input, slave_clock_, now);
            if (action.kind != ptp::CorrectionAction::Kind::none)
            {
                rec.correction = action.amount;
                correction_total_ += action.amount;
            }
        }
        sync_.push_back(rec);
    }

    void record_oracle(const ptp::SyncCycle& c, SimTime now)
    {
        const auto si = sync_flight_.find(c.seq);
        const auto ri = delayreq_flight_.find(c.seq);
        if (si == sync_flight_.end() || ri == delayreq_flight_.end())
        {
            throw InvariantViolation("completed cycle " + std::to_string(c.seq) + " has no traced Sync/DelayReq");
        }
        const Flight& sync = flights_[si->second];
        const Flight& req = flights_[ri->second];
        const SimTime tau1 = sync.env.send_time;
        const SimTime tau2 = *sync.arrival;
        const SimTime tau3 = req.env.send_time;
        const SimTime tau4 = *req.arrival;

        OracleRecord o;
        o.at = now;
        o.seq = c.seq;
        o.owd_ms = tau2 - tau1;
        o.owd_sm = tau4 - tau3;
        o.parts_ms = sync.parts;
        o.parts_sm = req.parts;
        o.measured_2x = (*c.t_s2 - *c.t_m1) - (*c.t_m4 - *c.t_s3);
        const Duration off2 = offset_at(tau2);
        const Duration off3 = offset_at(tau3);
        o.real_2x = off2 + off3;
        // Corrections have settled before τ2 (straddling cycles never complete).
        o.intrinsic_2x = o.real_2x - correction_total_ * 2;

        const Duration owd_ms_master = master_clock_.local_time(tau2) - master_clock_.local_time(tau1);
        const Duration owd_sm_master = master_clock_.local_time(tau4) - master_clock_.local_time(tau3);
        o.identity_ok = o.measured_2x == o.real_2x + owd_ms_master - owd_sm_master;

        const auto structural = [](const net::DelayBreakdown& p) { return p.asymmetry + p.transmission + p.attack + p.queueing; };
        o.asymmetry_2x = structural(sync.parts) - structural(req.parts);
        o.envelope_2x = sync.parts.jitter + req.parts.jitter + abs(owd_ms_master - o.owd_ms) + abs(owd_sm_master - o.owd_sm);
        const bool totals = sync.parts.total() == o.owd_ms && req.parts.total() == o.owd_sm;
        o.decomposition_ok = totals && abs(o.measured_2x - o.real_2x - o.asymmetry_2x) <= o.envelope_2x;

        if (!o.identity_ok)
        {
            ++oracle_identity_violations_;
        }
        if (!o.decomposition_ok)
        {
            ++oracle_decomposition_violations_;
        }
        oracle_.push_back(o);
    }

    // ---- wrap-up ----------------------------------------------------------

    RunResult finish()
    {
        RunResult r;
        r.scenario = s_;
        r.sync = std::move(sync_);
        r.bounds = std::move(bounds_);
        r.oracle = std::move(oracle_);
        r.attack = adversary_.log();
        r.corrections = slave_clock_.corrections();

        std::stable_sort(tapped_.begin(), tapped_.end(),
                         [](const TruthObservation& a, const TruthObservation& b) { return a.obs.seen_at < b.obs.seen_at; });
        std::vector<net::Observation> real;
        real.reserve(tapped_.size());
        for (const auto& t : tapped_)
        {
            real.push_back(t.obs);
        }
        const std::int64_t end_bin = (s_.duration.ns() + net::kBinNs - 1) / net::kBinNs;
        r.observations = net::with_noise(real, noise_, s_.noise_mode, 0, end_bin);
        r.tapped = std::move(tapped_);
        r.truth_profile = truth_profile(r.tapped, s_);

        auto& m = r.summary;
        m.name = s_.name;
        m.seed = s_.seed;
        m.duration = s_.duration;
        const auto& cnt = slave_.counters();
        m.cycles_completed = cnt.completed;
        m.cycles_straddled = cnt.straddled;
        m.cycles_abandoned = cnt.abandoned;
        m.stale_followup = cnt.stale_followup;
        m.stale_delay_resp = cnt.stale_delay_resp;

        summarize_offsets(r);

        m.bound_cycles = bound_cycles_;
        m.bound_violations = bound_violations_;
        m.midpoint_violations = midpoint_violations_;
        m.system_bound_violations = system_bound_violations_;
        m.rejected_cycles = gate_.rejected();
        m.longest_starvation = gate_.longest_starvation();
        m.observed_t_interval = gate_.observed_t_interval();
        m.suspicious_cycles = suspicious_;

        m.attack_plan = s_.attack.plan;
        const auto& arm = adversary_.arm_result();
        m.armed = adversary_.armed();
        m.arm_confidence = arm.confidence;
        m.arm_note = arm.note;
        m.delayed_packets = adversary_.delayed_packets();
        m.dropped_packets = adversary_.dropped_packets();
        m.max_injected = adversary_.max_injected();
        m.replay_rejected = replay_rejected_;
        m.replay_rejected_ptp = replay_rejected_ptp_;
        summarize_replay(m);

        m.oracle_cycles = r.oracle.size();
        m.oracle_identity_violations = oracle_identity_violations_;
        m.oracle_decomposition_violations = oracle_decomposition_violations_;

        if (s_.detect_at_end)
        {
            try
            {
                r.detection = detect::detect(r.observations);
                m.detector_status = "ok";
                m.detector_mode = std::string(detect::to_string(r.detection->profile.mode));
                m.detector_confidence = r.detection->profile.confidence;
                m.detector_matches_truth = r.detection->profile.matches(r.truth_profile);
                m.detector_note = r.detection->periodic_note;
            }
            catch (const DetectError& e)
            {
                m.detector_status = "failed";
                m.detector_note = e.what();
            }
        }
        return r;
    }

    void summarize_offsets(RunResult& r) const
    {
        auto& m = r.summary;
        const auto& plan = adversary_.plan();
        const SimTime run_end = SimTime::from_duration(s_.duration);
        const bool attacking = s_.attack.plan != "none";
        m.converge_end = attacking && plan.end < run_end ? plan.end : run_end;
        const SimTime from = m.converge_end - std::min(s_.converge_window, m.converge_end.since_epoch());

        long double sum = 0;
        std::size_t n = 0;
        for (const auto& rec : r.sync)
        {
            m.max_abs_offset = std::max(m.max_abs_offset, abs(rec.true_offset));
            if (rec.at > from && rec.at <= m.converge_end)
            {
                sum += static_cast<long double>(rec.true_offset.ns());
                ++n;
            }
        }
        if (n > 0)
        {
            m.converged_offset = Duration(static_cast<std::int64_t>(std::llround(sum / static_cast<long double>(n))));
        }
        if (!r.sync.empty())
        {
            m.final_offset = r.sync.back().true_offset;
        }
        if (!attacking)
        {
            return;
        }
        const Duration spike_window = Duration::seconds(5);
        const auto spike = [&](SimTime at) {
            Duration peak{};
            for (const auto& rec : r.sync)
            {
                if (rec.at >= at && rec.at < at + spike_window)
                {
                    peak = std::max(peak, abs(rec.measured));
                }
            }
            return peak;
        };
        m.spike_start = spike(plan.start);
        if (plan.end < run_end)
        {
            m.spike_end = spike(plan.end);
        }
    }

    // Arrival without the attacker's hold. In overtake mode the link's own
    // FIFO wait stays part of it.
    SimTime base_arrival(const Flight& f) const
    {
        const auto& p = f.parts;
        Duration d = p.common + p.asymmetry + p.transmission + p.jitter;
        if (s_.link.allow_overtake)
        {
            d += p.queueing;
        }
        return f.env.send_time + d;
    }

    void summarize_replay(RunSummary& m) const
    {
        std::array<std::vector<std::uint64_t>, 2> by_seq;
        for (const auto& f : flights_)
        {
            by_seq[net::index(f.env.direction)].push_back(f.env.id);
        }
        const bool strict = s_.guard.replay && s_.guard.replay->window == 1;
        for (const auto& ids : by_seq)
        {
            std::optional<SimTime> last_clean;
            for (const auto id : ids)
            {
                const auto& f = flights_[id];
                if (f.attack == Duration{})
                {
                    const SimTime b = base_arrival(f);
                    if (last_clean)
                    {
                        m.max_undelayed_gap = std::max(m.max_undelayed_gap, b - *last_clean);
                    }
                    last_clean = b;
                }
            }
            for (std::size_t i = 0; i < ids.size(); ++i)
            {
                const auto& a = flights_[ids[i]];
                if (!a.arrival || a.attack <= Duration{} || !a.replay_ok)
                {
                    continue;
                }
                m.max_accepted_attack_delay = std::max(m.max_accepted_attack_delay, a.attack);
                if (!strict)
                {
                    continue;
                }
                // The next undelayed packet caps how long an accepted one can be held.
                for (std::size_t j = i + 1; j < ids.size(); ++j)
                {
                    const auto& c = flights_[ids[j]];
                    if (c.attack == Duration{} && c.arrival)
                    {
                        if (a.attack > base_arrival(c) - base_arrival(a))
                        {
                            ++m.replay_cap_violations;
                        }
                        break;
                    }
                }
            }
        }
    }

    const Scenario& s_;
    net::EncryptionScheme scheme_;
    ClockModel master_clock_;
    ClockModel slave_clock_;
    ptp::LagSource lags_;
    ptp::Master master_;
    ptp::Slave slave_;
    net::Link link_;
    guard::RtdGate gate_;
    ptp::ServoState servo_;
    adversary::Adversary adversary_;
    std::array<Rng, 2> cover_rng_;
    net::NoiseSource noise_;
    std::vector<guard::ReplayWindow> replay_;
    EventLoop loop_;

    std::vector<Flight> flights_;
    std::array<std::uint64_t, 2> tunnel_seq_{};
    std::vector<TruthObservation> tapped_;
    std::unordered_map<std::uint64_t, std::uint64_t> sync_flight_;
    std::unordered_map<std::uint64_t, std::uint64_t> delayreq_flight_;
    Duration correction_total_{};

    std::vector<SyncRecord> sync_;
    std::vector<BoundRecord> bounds_;
    std::vector<OracleRecord> oracle_;
    std::uint64_t bound_cycles_ = 0;
    std::uint64_t bound_violations_ = 0;
    std::uint64_t midpoint_violations_ = 0;
    std::uint64_t system_bound_violations_ = 0;
    std::uint64_t suspicious_ = 0;
    std::uint64_t replay_rejected_ = 0;
    std::uint64_t replay_rejected_ptp_ = 0;
    std::uint64_t oracle_identity_violations_ = 0;
    std::uint64_t oracle_decomposition_violations_ = 0;
};

template <typename T>
std::int64_t modal(const std::map<std::int64_t, T>& hist)
{
    std::int64_t best = 0;
    T count{};
    for (const auto& [v, c] : hist)
    {
        if (c > count)
        {
            best = v;
            count = c;
        }
    }
    return best;
}

} // namespace

std::vector<std::pair<std::string, std::string>> RunSummary::fields() const
{
    const auto ns = [](Duration d) { return std::to_string(d.ns()); };
    const auto u = [](std::uint64_t v) { return std::to_string(v); };
    const auto b = [](bool v) { return std::string(v ? "1" : "0"); };
    return {
        {"name", name},
        {"seed", u(seed)},
        {"duration_ns", ns(duration)},
        {"cycles_completed", u(cycles_completed)},
        {"cycles_straddled", u(cycles_straddled)},
        {"cycles_abandoned", u(cycles_abandoned)},
        {"stale_followup", u(stale_followup)},
        {"stale_delay_resp", u(stale_delay_resp)},
        {"converged_offset_ns", ns(converged_offset)},
        {"converge_end_ns", std::to_string(converge_end.ns())},
        {"max_abs_offset_ns", ns(max_abs_offset)},
        {"final_offset_ns", ns(final_offset)},
        {"spike_start_ns", ns(spike_start)},
        {"spike_end_ns", ns(spike_end)},
        {"bound_cycles", u(bound_cycles)},
        {"bound_violations", u(bound_violations)},
        {"midpoint_violations", u(midpoint_violations)},
        {"system_bound_violations", u(system_bound_violations)},
        {"rejected_cycles", u(rejected_cycles)},
        {"longest_starvation", u(longest_starvation)},
        {"observed_t_interval_ns", ns(observed_t_interval)},
        {"suspicious_cycles", u(suspicious_cycles)},
        {"attack_plan", attack_plan},
        {"attack_armed", b(armed)},
        {"arm_confidence", fmt_double(arm_confidence)},
        {"arm_note", arm_note},
        {"delayed_packets", u(delayed_packets)},
        {"dropped_packets", u(dropped_packets)},
        {"max_injected_ns", max_injected.is_infinite() ? "inf" : ns(max_injected)},
        {"replay_rejected", u(replay_rejected)},
        {"replay_rejected_ptp", u(replay_rejected_ptp)},
        {"max_accepted_attack_delay_ns", ns(max_accepted_attack_delay)},
        {"max_undelayed_gap_ns", ns(max_undelayed_gap)},
        {"replay_cap_violations", u(replay_cap_violations)},
        {"detector_status", detector_status},
        {"detector_mode", detector_mode},
        {"detector_confidence", fmt_double(detector_confidence)},
        {"detector_matches_truth", b(detector_matches_truth)},
        {"detector_note", detector_note},
        {"oracle_cycles", u(oracle_cycles)},
        {"oracle_identity_violations", u(oracle_identity_violations)},
        {"oracle_decomposition_violations", u(oracle_decomposition_violations)},
    };
}

detect::PtpProfile truth_profile(std::span<const TruthObservation> tapped, const Scenario& s)
{
    const auto scheme = net::EncryptionScheme::by_name(s.encryption);
    const auto wire = [&](MessageKind k) { return guard::apply_padding(ptp::plain_length(k), s.guard.padding, scheme); };
    detect::PtpProfile p;
    p.t3 = Duration(s.engine.sync_interval.ns() / net::kBinNs * net::kBinNs);
    p.x = wire(MessageKind::sync);
    p.x_req = wire(MessageKind::delay_req);
    p.announce_period = Duration(s.engine.announce_interval.ns() / net::kBinNs * net::kBinNs);

    std::map<std::uint64_t, std::array<std::optional<std::int64_t>, 4>> cycles;
    bool announce_seen = false;
    for (const auto& t : tapped)
    {
        if (!t.kind)
        {
            continue;
        }
        if (*t.kind == MessageKind::announce)
        {
            announce_seen = true;
            continue;
        }
        auto& slot = cycles[t.msg_seq][static_cast<std::size_t>(*t.kind)];
        if (!slot)
        {
            slot = net::bin_of(t.obs.seen_at);
        }
    }
    if (announce_seen)
    {
        p.y = wire(MessageKind::announce);
    }
    std::map<std::int64_t, int> h0;
    std::map<std::int64_t, int> h1;
    std::map<std::int64_t, int> h2;
    for (const auto& [seq, c] : cycles)
    {
        (void)seq;
        const auto& [sy, fu, rq, rs] = c;
        if (sy && fu)
        {
            ++h0[*fu - *sy];
        }
        if (fu && rq)
        {
            ++h1[*rq - *fu];
        }
        if (rq && rs)
        {
            ++h2[*rs - *rq];
        }
    }
    p.t0 = Duration(modal(h0) * net::kBinNs);
    p.t1 = Duration(modal(h1) * net::kBinNs);
    p.t2 = Duration(modal(h2) * net::kBinNs);
    return p;
}

RunResult run_scenario(const Scenario& s)
{
    s.validate();
    Simulation sim(s);
    return sim.run();
}

Scenario random_soundness_scenario(std::uint64_t seed)
{
    Rng rng(mix_seed(seed, 0x5011d));
    const auto ms = [](double v) { return Duration(static_cast<std::int64_t>(v * 1e6)); };
    const auto uniform_ns = [&](std::int64_t lo, std::int64_t hi) { return Duration(rng.uniform_int(lo, hi)); };

    Scenario s;
    s.name = "soundness-" + std::to_string(seed);
    s.seed = seed;
    s.duration = ms(1600);
    s.detect_at_end = false;
    s.write_obs_trace = false;
    s.converge_window = ms(1000);
    s.slave.offset = uniform_ns(-200'000'000, 200'000'000);
    s.master.offset = uniform_ns(-1'000'000, 1'000'000);

    s.link.d_common = uniform_ns(0, 5'000'000);
    s.link.delta_ms = rng.bernoulli(0.5) ? uniform_ns(0, 10'000'000) : Duration{};
    s.link.delta_sm = rng.bernoulli(0.5) ? uniform_ns(0, 10'000'000) : Duration{};
    s.link.rate = rng.bernoulli(0.3) ? static_cast<std::uint64_t>(rng.uniform_int(100'000, 100'000'000)) : 0;
    s.link.allow_overtake = rng.bernoulli(0.5);
    switch (rng.uniform_int(0, 2))
    {
    case 1:
        s.jitter.kind = "uniform";
        s.jitter.lo = uniform_ns(0, 200'000);
        s.jitter.hi = s.jitter.lo + uniform_ns(0, 3'000'000);
        break;
    case 2:
        s.jitter.kind = "normal";
        s.jitter.mean = uniform_ns(0, 1'000'000);
        s.jitter.sigma = uniform_ns(1, 1'000'000);
        break;
    default:
        break;
    }
    s.encryption = rng.bernoulli(0.5) ? "ipsec-tunnel" : "identity";

    s.engine.followup_lag = uniform_ns(1'000'000, 10'000'000);
    s.engine.delayreq_lag = uniform_ns(0, 20'000'000);
    s.engine.delayresp_lag = uniform_ns(0, 2'000'000);
    s.engine.first_sync = uniform_ns(0, 50'000'000);

    s.servo.enabled = rng.bernoulli(0.7);
    s.servo.alpha = 0.25 + 0.75 * rng.uniform01();
    s.servo.slew_window = rng.bernoulli(0.5) ? Duration{} : uniform_ns(1'000'000, 100'000'000);

    // d_min never exceeds the true minimum delay of the direction.
    auto l = s.link;
    l.jitter = s.jitter.build();
    const auto scheme = net::EncryptionScheme::by_name(s.encryption);
    const auto min_owd = [&](Direction d) {
        Duration m = Duration::infinite();
        for (const auto k : ptp::kAllKinds)
        {
            if (ptp::direction_of(k) == d)
            {
                m = std::min(m, l.min_delay(d, scheme.encrypt_wrap(ptp::plain_length(k))));
            }
        }
        return m;
    };
    const auto fraction = [&](Duration d) { return Duration(static_cast<std::int64_t>(static_cast<double>(d.ns()) * rng.uniform01())); };
    s.guard.owd = guard::OwdConstraints{fraction(min_owd(Direction::master_to_slave)), fraction(min_owd(Direction::slave_to_master))};
    if (rng.bernoulli(0.3))
    {
        s.guard.rtd_max = s.guard.owd->sum() + uniform_ns(0, 60'000'000);
    }
    if (rng.bernoulli(0.3))
    {
        s.guard.replay = guard::ReplayPolicy{static_cast<std::uint32_t>(rng.uniform_int(1, 8))};
    }
    s.servo_input = rng.bernoulli(0.3) ? ServoInput::midpoint : ServoInput::offset;
    if (rng.bernoulli(0.2))
    {
        s.cover.rate_ms = 50.0 + 150.0 * rng.uniform01();
        s.cover.rate_sm = 50.0 + 150.0 * rng.uniform01();
    }

    static const char* const target_sets[] = {"Sync", "Sync,FollowUp", "DelayReq", "DelayResp", "FollowUp", "Sync,DelayReq"};
    s.attack.classifier = adversary::ClassifierMode::oracle;
    s.attack.start = uniform_ns(0, 800'000'000);
    if (rng.bernoulli(0.5))
    {
        s.attack.end = s.attack.start + uniform_ns(0, 800'000'000);
    }
    const auto attack_delay = [&] { return rng.bernoulli(0.15) ? Duration::infinite() : uniform_ns(0, 80'000'000); };
    switch (rng.uniform_int(0, 3))
    {
    case 1:
        s.attack.plan = "selective";
        s.attack.targets = target_sets[rng.uniform_int(0, 5)];
        s.attack.delay = attack_delay();
        break;
    case 2:
        s.attack.plan = "incremental";
        s.attack.targets = target_sets[rng.uniform_int(0, 5)];
        s.attack.ramp = DriftRate::ppm(rng.uniform_int(0, 50'000));
        s.attack.basis = rng.bernoulli(0.5) ? adversary::RampBasis::elapsed : adversary::RampBasis::offset_rate;
        break;
    case 3:
        s.attack.plan = "asymmetric";
        s.attack.direction = rng.bernoulli(0.5) ? Direction::master_to_slave : Direction::slave_to_master;
        s.attack.delay = attack_delay();
        break;
    default:
        break;
    }
    return s;
}

} // namespace ptpdelay::harness
