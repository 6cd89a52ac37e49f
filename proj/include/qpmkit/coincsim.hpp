#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "qpmkit/errors.hpp"
#include "qpmkit/pairstats.hpp"

// Time-domain Monte Carlo of a two-detector coincidence measurement on a
// photon-pair source. Time tags are integer picoseconds.

namespace qpmkit {

using TimeTag = std::int64_t;  // ps

inline constexpr double kPsPerSecond = 1e12;

inline TimeTag seconds_to_ps(double s) { return static_cast<TimeTag>(std::llround(s * kPsPerSecond)); }

enum class Splitter {
    FiftyFifty,     // each photon independently to arm A or B
    Deterministic,  // signal always to A, idler always to B
};

struct SimConfig {
    double pair_rate_hz = 0.0;
    double dark_rate_a_hz = 0.0;
    double dark_rate_b_hz = 0.0;
    double efficiency_a = 1.0;
    double efficiency_b = 1.0;
    double jitter_sigma_s = 0.0;
    double duration_s = 1.0;
    std::uint64_t seed = 0;
    Splitter splitter = Splitter::FiftyFifty;
};

inline void validate(const SimConfig& c) {
    if (!(c.pair_rate_hz >= 0.0) || !(c.dark_rate_a_hz >= 0.0) || !(c.dark_rate_b_hz >= 0.0)) {
        throw DomainError("simulation rates must be non-negative");
    }
    auto unit = [](double f) { return f >= 0.0 && f <= 1.0; };
    if (!unit(c.efficiency_a) || !unit(c.efficiency_b)) {
        throw DomainError("detector efficiencies must lie in [0, 1]");
    }
    if (!(c.jitter_sigma_s >= 0.0)) throw DomainError("jitter must be non-negative");
    if (!(c.duration_s > 0.0)) throw DomainError("duration must be positive");
}

// Independent, reproducible substreams derived from one 64-bit seed. Each
// noise source owns its stream so enabling one source never shifts the
// draws of another.
class SplitRng {
public:
    enum class Stream : std::uint32_t {
        Emission = 1,
        Routing,
        ThinningA,
        ThinningB,
        JitterA,
        JitterB,
        DarkA,
        DarkB,
    };

    explicit SplitRng(std::uint64_t seed) : seed_(seed) {}

    std::mt19937_64 engine(Stream stream) const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed_ & 0xffffffffu),
                          static_cast<std::uint32_t>(seed_ >> 32),
                          static_cast<std::uint32_t>(stream), 0x51ed2701u};
        return std::mt19937_64(seq);
    }

private:
    std::uint64_t seed_;
};

struct TimeTagStreams {
    std::vector<TimeTag> a;
    std::vector<TimeTag> b;
    std::size_t emitted_pairs = 0;
    double duration_s = 0.0;
};

namespace detail {

// Homogeneous Poisson process on [0, duration).
inline std::vector<double> poisson_times(std::mt19937_64& eng, double rate_hz, double duration_s) {
    std::vector<double> times;
    if (rate_hz <= 0.0) return times;
    times.reserve(static_cast<std::size_t>(rate_hz * duration_s * 1.01 + 16));
    std::exponential_distribution<double> gap(rate_hz);
    for (double t = gap(eng); t < duration_s; t += gap(eng)) times.push_back(t);
    return times;
}

struct ArmInput {
    const std::vector<double>* photon_times;  // emission times of photons routed to this arm
    double efficiency;
    double jitter_sigma_s;
    double dark_rate_hz;
    double duration_s;
    SplitRng::Stream thinning;
    SplitRng::Stream jitter;
    SplitRng::Stream dark;
};

inline std::vector<TimeTag> detect_arm(const SplitRng& rng, const ArmInput& in) {
    auto thin_eng = rng.engine(in.thinning);
    auto jitter_eng = rng.engine(in.jitter);
    auto dark_eng = rng.engine(in.dark);
    std::bernoulli_distribution detected(in.efficiency);
    std::normal_distribution<double> jitter(0.0, 1.0);

    std::vector<TimeTag> tags;
    tags.reserve(in.photon_times->size());
    for (double t : *in.photon_times) {
        if (!detected(thin_eng)) continue;
        const double smear = in.jitter_sigma_s > 0.0 ? in.jitter_sigma_s * jitter(jitter_eng) : 0.0;
        tags.push_back(seconds_to_ps(t + smear));
    }
    for (double t : poisson_times(dark_eng, in.dark_rate_hz, in.duration_s)) {
        tags.push_back(seconds_to_ps(t));
    }
    std::sort(tags.begin(), tags.end());
    return tags;
}

}  // namespace detail

// Generates the two detector streams. `parallel` processes the arms on
// separate threads; output is bit-identical either way.
inline TimeTagStreams simulate(const SimConfig& config, bool parallel = false) {
    validate(config);
    const SplitRng rng(config.seed);

    auto emission_eng = rng.engine(SplitRng::Stream::Emission);
    const auto emissions = detail::poisson_times(emission_eng, config.pair_rate_hz, config.duration_s);

    std::vector<double> to_a;
    std::vector<double> to_b;
    to_a.reserve(emissions.size());
    to_b.reserve(emissions.size());
    if (config.splitter == Splitter::Deterministic) {
        to_a = emissions;
        to_b = emissions;
    } else {
        auto routing_eng = rng.engine(SplitRng::Stream::Routing);
        std::bernoulli_distribution goes_to_a(0.5);
        for (double t : emissions) {
            for (int photon = 0; photon < 2; ++photon) {
                (goes_to_a(routing_eng) ? to_a : to_b).push_back(t);
            }
        }
    }

    const detail::ArmInput arm_a{&to_a,
                                 config.efficiency_a,
                                 config.jitter_sigma_s,
                                 config.dark_rate_a_hz,
                                 config.duration_s,
                                 SplitRng::Stream::ThinningA,
                                 SplitRng::Stream::JitterA,
                                 SplitRng::Stream::DarkA};
    const detail::ArmInput arm_b{&to_b,
                                 config.efficiency_b,
                                 config.jitter_sigma_s,
                                 config.dark_rate_b_hz,
                                 config.duration_s,
                                 SplitRng::Stream::ThinningB,
                                 SplitRng::Stream::JitterB,
                                 SplitRng::Stream::DarkB};

    TimeTagStreams out;
    out.emitted_pairs = emissions.size();
    out.duration_s = config.duration_s;
    if (parallel) {
        auto fut_b = std::async(std::launch::async, [&] { return detail::detect_arm(rng, arm_b); });
        out.a = detail::detect_arm(rng, arm_a);
        out.b = fut_b.get();
    } else {
        out.a = detail::detect_arm(rng, arm_a);
        out.b = detail::detect_arm(rng, arm_b);
    }
    return out;
}

// Counts of t_b - t_a in bins of width bin_width_ps over [-span/2, span/2).
// Bin i covers [-span/2 + i w, -span/2 + (i+1) w).
struct CoincidenceHistogram {
    TimeTag bin_width_ps = 100;
    TimeTag span_ps = 50'000;
    double duration_s = 0.0;
    double center_window_s = 2e-9;
    std::vector<std::uint64_t> bins;

    TimeTag half_span_ps() const { return span_ps / 2; }
    double bin_width_s() const { return static_cast<double>(bin_width_ps) / kPsPerSecond; }
    double bin_center_s(std::size_t i) const {
        return (static_cast<double>(-half_span_ps()) +
                (static_cast<double>(i) + 0.5) * static_cast<double>(bin_width_ps)) /
               kPsPerSecond;
    }
    std::uint64_t total() const { return std::accumulate(bins.begin(), bins.end(), std::uint64_t{0}); }
};

inline constexpr double kDefaultBinWidthS = 100e-12;
inline constexpr double kDefaultSpanS = 50e-9;
inline constexpr double kDefaultWindowS = 2e-9;

// Two-pointer sweep over sorted streams; cost is linear in the number of
// events plus the number of pairs that fall inside the span.
inline CoincidenceHistogram build_histogram(std::span<const TimeTag> a, std::span<const TimeTag> b,
                                            double bin_width_s, double span_s, double duration_s) {
    const TimeTag width = seconds_to_ps(bin_width_s);
    const TimeTag span = seconds_to_ps(span_s);
    if (width <= 0 || span <= 0) throw DomainError("bin width and span must be positive");
    if (span % (2 * width) != 0) {
        throw DomainError("span must be an even multiple of the bin width");
    }
    if (!std::is_sorted(a.begin(), a.end()) || !std::is_sorted(b.begin(), b.end())) {
        throw DomainError("time-tag streams must be sorted");
    }

    CoincidenceHistogram h;
    h.bin_width_ps = width;
    h.span_ps = span;
    h.duration_s = duration_s;
    h.bins.assign(static_cast<std::size_t>(span / width), 0);
    const TimeTag half = span / 2;

    std::size_t first = 0;
    for (const TimeTag ta : a) {
        while (first < b.size() && b[first] < ta - half) ++first;
        for (std::size_t j = first; j < b.size() && b[j] < ta + half; ++j) {
            const TimeTag offset = b[j] - ta + half;  // in [0, span)
            ++h.bins[static_cast<std::size_t>(offset / width)];
        }
    }
    return h;
}

// Merges groups of `factor` adjacent bins.
inline CoincidenceHistogram rebin(const CoincidenceHistogram& h, std::size_t factor) {
    if (factor == 0 || h.bins.size() % factor != 0) {
        throw DomainError("rebin factor must divide the number of bins");
    }
    CoincidenceHistogram out = h;
    out.bin_width_ps = h.bin_width_ps * static_cast<TimeTag>(factor);
    out.bins.assign(h.bins.size() / factor, 0);
    for (std::size_t i = 0; i < h.bins.size(); ++i) out.bins[i / factor] += h.bins[i];
    return out;
}

struct HistogramAnalysis {
    double measured_hz = 0.0;
    double accidentals_hz = 0.0;
    double true_hz = 0.0;
    double car = 0.0;
    std::uint64_t window_counts = 0;
    std::uint64_t side_counts = 0;
    std::size_t window_bins = 0;
    std::size_t side_bins = 0;
};

// Central window [-window/2, window/2) gives the measured coincidences. The
// flat background is averaged over bins lying entirely at |dt| >= window
// (a guard band of window/2 either side of the central window), scaled to
// the window width.
inline HistogramAnalysis analyze_histogram(const CoincidenceHistogram& h, double window_s) {
    const TimeTag window = seconds_to_ps(window_s);
    if (window <= 0 || window > h.span_ps) throw DomainError("window must lie in (0, span]");
    if ((window / 2) % h.bin_width_ps != 0 || window % 2 != 0) {
        throw DomainError("half window must be a multiple of the bin width");
    }
    if (!(h.duration_s > 0.0)) throw DomainError("histogram duration must be positive");

    HistogramAnalysis r;
    const TimeTag half = h.half_span_ps();
    for (std::size_t i = 0; i < h.bins.size(); ++i) {
        const TimeTag lo = -half + static_cast<TimeTag>(i) * h.bin_width_ps;
        const TimeTag hi = lo + h.bin_width_ps;
        if (lo >= -window / 2 && hi <= window / 2) {
            r.window_counts += h.bins[i];
            ++r.window_bins;
        } else if (lo >= window || hi <= -window) {
            r.side_counts += h.bins[i];
            ++r.side_bins;
        }
    }
    if (r.side_bins == 0) throw DomainError("no side region left to estimate accidentals");

    const double mean_side = static_cast<double>(r.side_counts) / static_cast<double>(r.side_bins);
    r.measured_hz = static_cast<double>(r.window_counts) / h.duration_s;
    r.accidentals_hz = mean_side * static_cast<double>(r.window_bins) / h.duration_s;
    r.true_hz = true_coincidences(r.measured_hz, r.accidentals_hz).rate_hz;
    r.car = car(r.true_hz, r.accidentals_hz);
    return r;
}

// Pair rate implied by an analysed histogram: undo the splitter and the two
// detector efficiencies.
inline double recovered_pair_rate(const HistogramAnalysis& r, const SimConfig& config) {
    const double eff = config.efficiency_a * config.efficiency_b;
    if (!(eff > 0.0)) throw DomainError("cannot invert zero detection efficiency");
    const double split = config.splitter == Splitter::FiftyFifty ? splitter_correction(r.true_hz)
                                                                 : r.true_hz;
    return split / eff;
}

struct SweepRow {
    double pair_rate_hz = 0.0;
    HistogramAnalysis analysis;
};

// CAR against pair rate with every other setting fixed.
inline std::vector<SweepRow> car_sweep(const SimConfig& base, std::span<const double> pair_rates_hz,
                                       double bin_width_s = kDefaultBinWidthS,
                                       double span_s = kDefaultSpanS,
                                       double window_s = kDefaultWindowS) {
    std::vector<SweepRow> rows;
    for (double rate : pair_rates_hz) {
        SimConfig c = base;
        c.pair_rate_hz = rate;
        const auto streams = simulate(c);
        const auto h = build_histogram(streams.a, streams.b, bin_width_s, span_s, c.duration_s);
        rows.push_back({rate, analyze_histogram(h, window_s)});
    }
    return rows;
}

}  // namespace qpmkit
