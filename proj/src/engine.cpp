#include "sacc/engine.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <thread>
#include <tuple>

namespace sacc {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Canonical log order: cycle, then fetches before drains, then coordinates.
// Emission order differs between one engine and a group partition, so every
// run ends with this sort and identical inputs give identical logs.
void sort_log(std::vector<DramRecord>& log) {
    std::stable_sort(log.begin(), log.end(), [](const DramRecord& a, const DramRecord& b) {
        auto rank = [](char c) { return c == 'W' ? 0 : c == 'I' ? 1 : 2; };
        const int ra = rank(a.category);
        const int rb = rank(b.category);
        return std::tie(a.cycle, ra, a.group, a.tile, a.channel, a.filter_row) <
               std::tie(b.cycle, rb, b.group, b.tile, b.channel, b.filter_row);
    });
}

}  // namespace

struct ConvEngine::Impl {
    ArchConfig arch;
    LayerShape layer;
    const Tensor* input = nullptr;
    const FilterSet* filters = nullptr;
    EngineOptions opts;
    FixedPointRules rules;

    Tiling tiling;
    std::vector<PassDescriptor> seq;
    std::vector<UnitPlan> units;
    LayerTimeline timeline;
    std::size_t unit_begin = 0;  // owned units [unit_begin, unit_end)
    std::size_t unit_end = 0;
    std::size_t acc_stride = 1;  // n - 1 chain stages per slot (min 1)

    // Register and memory state, indexed by unit slot within the group.
    std::vector<std::int16_t> wr;       // [slot][i]
    std::vector<std::int64_t> acc;      // [slot][stage]
    std::vector<std::int64_t> bias;     // [slot]
    std::vector<std::int64_t> sram;     // [slot][bank][addr]
    std::vector<std::uint8_t> touched;  // [bank][addr], shared by all slots

    // Border column captured when a padded pass ends; it commits through F0
    // one cycle later (the right-border mux feeds no new product into it).
    bool spill_pending = false;
    std::uint32_t spill_addr = 0;
    std::uint32_t spill_bank = 0;
    std::uint32_t spill_active = 0;
    std::vector<std::int64_t> spill_vals;
    std::vector<std::int64_t> spill_bias;
    std::size_t pending_finalize = kNone;  // unit to drain once its spill lands

    std::size_t unit_pos = 0;  // current owned unit
    std::size_t pass_idx = 0;  // into seq
    std::uint32_t q = 0;       // cycle within the current pass
    std::uint64_t cycle = 0;
    bool flushed = false;

    Tensor output;
    DramTrace trace;
    std::uint64_t stall_cycles = 0;
    std::uint64_t retained = 0;

    Impl(const ArchConfig& a, const LayerShape& l, const Tensor& in, const FilterSet& f,
         const EngineOptions& o)
        : arch(a), layer(l), input(&in), filters(&f), opts(o), rules(rules_for(a)) {
        check_engine_support(arch, layer, in, f);
        tiling = derive_tiling(arch, layer);
        seq = pass_sequence(tiling, layer, arch.n);
        units = build_units(tiling, layer, arch, seq);
        timeline = schedule_timeline(units, layer, arch);

        const std::uint32_t gb = std::min(opts.group_begin, tiling.g);
        const std::uint32_t ge = std::min(opts.group_end, tiling.g);
        if (gb >= ge)
            raise(ErrorCode::EmptyRange, "engine owns no groups (begin " + std::to_string(gb) +
                                             ", end " + std::to_string(ge) + ")");
        unit_begin = static_cast<std::size_t>(gb) * tiling.t;
        unit_end = static_cast<std::size_t>(ge) * tiling.t;

        acc_stride = arch.n >= 2 ? arch.n - 1 : 1;
        wr.assign(static_cast<std::size_t>(arch.u) * arch.n, 0);
        acc.assign(static_cast<std::size_t>(arch.u) * acc_stride, 0);
        bias.assign(arch.u, 0);
        sram.assign(static_cast<std::size_t>(arch.u) * 2 * arch.sram_depth, 0);
        touched.assign(static_cast<std::size_t>(2) * arch.sram_depth, 0);
        spill_vals.assign(arch.u, 0);
        spill_bias.assign(arch.u, 0);

        unit_pos = unit_begin;
        pass_idx = units[unit_begin].pass_begin;
        // The engine's share of array time begins where the previous group's
        // last unit stopped computing; waiting from there to the first owned
        // unit's start is this engine's stall, so partitioned runs count
        // every stall exactly once.
        cycle = unit_begin == 0 ? 0 : timeline.units[unit_begin - 1].end;
        trace.logging = opts.logging;
        output = Tensor::zeros(layer.oc(), layer.ol, layer.ol);
    }

    std::int64_t& sram_at(std::uint32_t slot, std::uint32_t bank, std::uint32_t addr) {
        return sram[(static_cast<std::size_t>(slot) * 2 + bank) * arch.sram_depth + addr];
    }
    std::uint8_t& touched_at(std::uint32_t bank, std::uint32_t addr) {
        return touched[static_cast<std::size_t>(bank) * arch.sram_depth + addr];
    }

    void log_record(char cat, std::uint64_t at, const UnitPlan& u, std::uint32_t channel,
                    std::uint32_t filter_row, std::uint64_t words) {
        if (!opts.logging) return;
        trace.log.push_back({at, cat, u.group, u.tile, channel, filter_row, words});
    }

    // Commits last cycle's captured border column through F0.
    void commit_spill(CycleEvent* ev) {
        const bool first = touched_at(spill_bank, spill_addr) == 0;
        for (std::uint32_t f = 0; f < spill_active; ++f) {
            std::int64_t& word = sram_at(f, spill_bank, spill_addr);
            word = rules.acc_add(first ? spill_bias[f] : word, spill_vals[f]);
        }
        touched_at(spill_bank, spill_addr) = 1;
        spill_pending = false;
        if (ev) {
            ev->wrote = true;
            ev->write_addr = spill_addr;
            ev->write_bank = spill_bank;
            ev->write_value = sram_at(0, spill_bank, spill_addr);
        }
    }

    // Drains a finished unit's bank: requantize into the output map and
    // account the DRAM writes at the scheduled drain cycle.
    void finalize_unit(std::size_t idx) {
        const UnitPlan& u = units[idx];
        const UnitTiming& ut = timeline.units[idx];
        for (std::uint32_t f = 0; f < u.active; ++f) {
            const std::uint32_t k = u.group * arch.u + f;
            for (std::uint32_t rr = 0; rr < u.rows; ++rr)
                for (std::uint32_t col = 0; col < layer.ol; ++col) {
                    const std::uint32_t addr = rr * layer.ol + col;
                    if (opts.checked && f == 0 && !touched_at(u.bank, addr))
                        raise(ErrorCode::Internal,
                              "drained address " + std::to_string(addr) + " was never written");
                    output.at(k, u.row0 + rr, col) = rules.requantize(sram_at(f, u.bank, addr));
                }
        }
        const std::uint64_t words = static_cast<std::uint64_t>(u.rows) * layer.ol * u.active;
        trace.output_words += words;
        log_record('O', ut.drain_start, u, 0, 0, words);
    }

    // Bookkeeping when a unit's first pass begins: fresh first-touch bits,
    // bias registers for the group, and the weight fetches for filter rows
    // that never stream a pass in this tile.
    void begin_unit(const UnitPlan& u) {
        if (opts.checked)
            for (std::size_t p = unit_begin; p < unit_pos; ++p)
                if (units[p].bank == u.bank && timeline.units[p].drain_end > cycle)
                    raise(ErrorCode::Internal, "unit started before its bank finished draining");
        std::fill_n(touched.begin() + static_cast<std::size_t>(u.bank) * arch.sram_depth,
                    arch.sram_depth, std::uint8_t{0});
        for (std::uint32_t f = 0; f < u.active; ++f)
            bias[f] = rules.wrap_acc(filters->biases[u.group * arch.u + f]);
        for (const auto& [c, j] : u.passless_pairs) {
            const std::uint64_t words = static_cast<std::uint64_t>(arch.n) * u.active;
            trace.weight_words += words;
            log_record('W', cycle, u, c, j, words);
        }
    }

    void load_weight_run(const UnitPlan& u, const PassDescriptor& p) {
        for (std::uint32_t f = 0; f < u.active; ++f) {
            const std::uint32_t k = u.group * arch.u + f;
            for (std::uint32_t i = 0; i < arch.n; ++i)
                wr[static_cast<std::size_t>(f) * arch.n + i] =
                    filters->weight(k, p.channel, p.filter_row, i);
        }
        const std::uint64_t words = static_cast<std::uint64_t>(arch.n) * u.active;
        trace.weight_words += words;
        log_record('W', cycle, u, p.channel, p.filter_row, words);
    }

    bool owned_done() const {
        return unit_pos == unit_end && !spill_pending && pending_finalize == kNone;
    }
    bool done() const { return owned_done() && flushed; }

    void step_core(CycleEvent* ev) {
        if (done()) raise(ErrorCode::Internal, "step() after the layer finished");
        if (ev) {
            ev->cycle = cycle;
            ev->kind = CycleKind::Compute;
        }

        // Work carried over from the previous cycle: border-column commit,
        // then the drain of a unit whose last column just landed.
        if (spill_pending) commit_spill(ev);
        if (pending_finalize != kNone) {
            finalize_unit(pending_finalize);
            pending_finalize = kNone;
        }

        if (unit_pos == unit_end) {  // all owned units retired: flush cycle
            flushed = true;
            if (ev) ev->kind = CycleKind::Flush;
            ++cycle;
            return;
        }

        const UnitPlan& u = units[unit_pos];
        const UnitTiming& ut = timeline.units[unit_pos];
        if (cycle < ut.start) {  // bank still draining: the array idles
            ++stall_cycles;
            if (ev) ev->kind = CycleKind::Stall;
            ++cycle;
            return;
        }

        const PassDescriptor& p = seq[pass_idx];
        if (q == 0) {
            if (pass_idx == u.pass_begin) begin_unit(u);
            if (pass_idx == u.pass_begin || seq[pass_idx - 1].channel != p.channel ||
                seq[pass_idx - 1].filter_row != p.filter_row)
                load_weight_run(u, p);
            trace.input_words += layer.il;
            log_record('I', cycle, u, p.channel, p.filter_row, layer.il);
        }

        // One array cycle: feature x fans out to every live unit.  Stage 0
        // restarts each cycle; later stages add their product to the carry,
        // which the left-border mux zeroes at q == 0.  The oldest tap leaves
        // the chain toward column q - (n-1) + z and lands in SRAM through
        // F0: the bias on an address's first touch, the stored partial sum
        // afterwards.
        const std::int16_t x = input->at(p.channel, p.input_row, q);
        const std::int64_t wcol = static_cast<std::int64_t>(q) - (arch.n - 1) + layer.z;
        const bool in_pass_write = wcol >= 0 && wcol < layer.ol;
        const std::uint32_t addr =
            in_pass_write ? p.row_in_tile * layer.ol + static_cast<std::uint32_t>(wcol) : 0;
        const bool first = in_pass_write && touched_at(u.bank, addr) == 0;

        for (std::uint32_t f = 0; f < u.active; ++f) {
            const std::int16_t* w = &wr[static_cast<std::size_t>(f) * arch.n];
            std::int64_t* a = &acc[static_cast<std::size_t>(f) * acc_stride];
            const std::int64_t carry = (q == 0 || arch.n < 2) ? 0 : a[arch.n - 2];
            const std::int64_t out_tap = carry + rules.product(x, w[arch.n - 1]);
            if (arch.n >= 2) {
                for (std::uint32_t s = arch.n - 2; s >= 1; --s)
                    a[s] = rules.acc_add(q == 0 ? 0 : a[s - 1], rules.product(x, w[s]));
                a[0] = rules.wrap_acc(rules.product(x, w[0]));
            }
            if (in_pass_write) {
                std::int64_t& word = sram_at(f, u.bank, addr);
                word = rules.acc_add(first ? bias[f] : word, out_tap);
            }
        }
        if (in_pass_write) {
            touched_at(u.bank, addr) = 1;
            if (ev) {
                ev->wrote = true;
                ev->write_addr = addr;
                ev->write_bank = u.bank;
                ev->write_value = sram_at(0, u.bank, addr);
            }
        }

        // Products whose target column is inside the map count as retained.
        std::uint32_t kept = 0;
        for (std::uint32_t i = 0; i < arch.n; ++i) {
            const std::int64_t col = static_cast<std::int64_t>(q) - i + layer.z;
            if (col >= 0 && col < layer.ol) ++kept;
        }
        retained += static_cast<std::uint64_t>(kept) * u.active;

        if (ev) {
            ev->pass = p;
            ev->local_cycle = q;
            if (arch.n >= 2) ev->acc.assign(acc.begin(), acc.begin() + (arch.n - 1));
        }

        ++q;
        if (q == layer.il) {  // pass retired
            if (layer.z > 0) {
                spill_pending = true;
                spill_addr = p.row_in_tile * layer.ol + (layer.ol - 1);
                spill_bank = u.bank;
                spill_active = u.active;
                for (std::uint32_t f = 0; f < u.active; ++f) {
                    spill_vals[f] = acc[static_cast<std::size_t>(f) * acc_stride + arch.n - 2];
                    spill_bias[f] = bias[f];
                }
            }
            q = 0;
            ++pass_idx;
            if (pass_idx == u.pass_end) {
                pending_finalize = unit_pos;
                ++unit_pos;
                if (unit_pos < unit_end) pass_idx = units[unit_pos].pass_begin;
            }
        }
        ++cycle;
    }
};

ConvEngine::ConvEngine(const ArchConfig& arch, const LayerShape& layer, const Tensor& input,
                       const FilterSet& filters, const EngineOptions& opts)
    : impl_(std::make_unique<Impl>(arch, layer, input, filters, opts)) {}

ConvEngine::~ConvEngine() = default;

bool ConvEngine::done() const { return impl_->done(); }

CycleEvent ConvEngine::step() {
    CycleEvent ev;
    impl_->step_core(&ev);
    return ev;
}

RunResult ConvEngine::run() {
    while (!impl_->done()) impl_->step_core(nullptr);
    const bool full_range = impl_->unit_begin == 0 && impl_->unit_end == impl_->units.size();
    if (full_range && impl_->cycle != impl_->timeline.total_cycles)
        raise(ErrorCode::Internal, "engine finished at cycle " + std::to_string(impl_->cycle) +
                                       ", schedule says " +
                                       std::to_string(impl_->timeline.total_cycles));
    RunResult res;
    res.output = std::move(impl_->output);
    res.cycles = impl_->timeline.total_cycles;
    res.stall_cycles = impl_->stall_cycles;
    res.trace = std::move(impl_->trace);
    res.retained_products = impl_->retained;
    res.utilization =
        static_cast<double>(impl_->retained) /
        (static_cast<double>(impl_->arch.u) * impl_->arch.n * static_cast<double>(res.cycles));
    return res;
}

const Tiling& ConvEngine::tiling() const { return impl_->tiling; }
const LayerTimeline& ConvEngine::timeline() const { return impl_->timeline; }

std::int64_t ConvEngine::acc(std::uint32_t slot, std::uint32_t stage) const {
    return impl_->acc[static_cast<std::size_t>(slot) * impl_->acc_stride + stage];
}

std::int64_t ConvEngine::sram_word(std::uint32_t slot, std::uint32_t bank,
                                   std::uint32_t addr) const {
    return impl_->sram[(static_cast<std::size_t>(slot) * 2 + bank) * impl_->arch.sram_depth +
                       addr];
}

void check_engine_support(const ArchConfig& arch, const LayerShape& layer, const Tensor& input,
                          const FilterSet& filters) {
    validate_arch(arch);
    if (layer.s != 1)
        raise(ErrorCode::UnsupportedStride, "the unit streams rows at stride 1 only");
    if (layer.fl != arch.n)
        raise(ErrorCode::FilterWidthMismatch, "fl = " + std::to_string(layer.fl) +
                                                  " does not match n = " + std::to_string(arch.n));
    if (layer.z > 1 || 2 * layer.z > arch.n - 1)
        raise(ErrorCode::UnsupportedPadding,
              "padding z = " + std::to_string(layer.z) +
                  " exceeds what the accumulator chain can hold (need z <= 1 and 2z <= n-1)");
    if (input.channels != layer.ic || input.rows != layer.il || input.cols != layer.il)
        raise(ErrorCode::ShapeMismatch, "input tensor does not match the layer shape");
    filters.check_consistent();
    if (!filters.matches(layer))
        raise(ErrorCode::ShapeMismatch, "filter set does not match the layer shape");
    derive_tiling(arch, layer);  // RowTooWide
}

RunResult run_layer(const ArchConfig& arch, const LayerShape& layer, const Tensor& input,
                    const FilterSet& filters, const EngineOptions& opts, std::uint32_t threads) {
    check_engine_support(arch, layer, input, filters);
    const Tiling tiling = derive_tiling(arch, layer);
    if (threads <= 1 || tiling.g == 1) {
        ConvEngine engine(arch, layer, input, filters, opts);
        RunResult res = engine.run();
        sort_log(res.trace.log);
        return res;
    }

    // One engine per contiguous chunk of filter groups.  The shared timeline
    // fixes every unit's cycles up front, so the partition changes nothing.
    const std::uint32_t workers = std::min(threads, tiling.g);
    auto chunk = [&](std::uint32_t w) {
        return static_cast<std::uint32_t>(static_cast<std::uint64_t>(tiling.g) * w / workers);
    };
    std::vector<RunResult> parts(workers);
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::uint32_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                EngineOptions sub = opts;
                sub.group_begin = chunk(w);
                sub.group_end = chunk(w + 1);
                ConvEngine engine(arch, layer, input, filters, sub);
                parts[w] = engine.run();
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    RunResult res;
    res.output = Tensor::zeros(layer.oc(), layer.ol, layer.ol);
    res.cycles = parts[0].cycles;
    res.trace.logging = opts.logging;
    for (std::uint32_t w = 0; w < workers; ++w) {
        const std::uint32_t ch_begin = chunk(w) * arch.u;
        const std::uint32_t ch_end = std::min(layer.m, chunk(w + 1) * arch.u);
        const std::size_t from = res.output.index(ch_begin, 0, 0);
        const std::size_t count =
            static_cast<std::size_t>(ch_end - ch_begin) * layer.ol * layer.ol;
        std::copy_n(parts[w].output.data.begin() + from, count, res.output.data.begin() + from);
        res.stall_cycles += parts[w].stall_cycles;
        res.retained_products += parts[w].retained_products;
        res.trace.weight_words += parts[w].trace.weight_words;
        res.trace.input_words += parts[w].trace.input_words;
        res.trace.output_words += parts[w].trace.output_words;
        res.trace.log.insert(res.trace.log.end(), parts[w].trace.log.begin(),
                             parts[w].trace.log.end());
    }
    sort_log(res.trace.log);
    res.utilization =
        static_cast<double>(res.retained_products) /
        (static_cast<double>(arch.u) * arch.n * static_cast<double>(res.cycles));
    return res;
}

}  // namespace sacc
