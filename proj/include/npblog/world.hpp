#pragma once

// Possible worlds over a grounded network and the Gibbs engine that moves
// between them.
//
// Every ground variable has an id. Scalar variables (attributes, indicators,
// observed symbols, number variables) hold a Value; sticks and collections
// hold a probability vector. Evaluating a variable's draw records which
// variables it read, and the reverse of that relation (children) is the
// Markov blanket used by the single-site updates.

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "npblog/dp_core.hpp"
#include "npblog/evidence.hpp"
#include "npblog/random.hpp"

namespace npblog {

inline constexpr std::size_t kMaxInputs = 8;

struct WorldState {
    std::vector<Value> scalars;
    std::vector<std::vector<double>> vectors;
    std::vector<std::vector<long>> atom_counts;  // by type id; indicators currently on each atom
    std::vector<long> active;                    // by type id; atoms with a nonzero count

    long active_count(int type) const { return active[static_cast<std::size_t>(type)]; }
};

/// Evaluates a compiled term; `read` returns the value of a ground variable.
template <class Read>
Value eval_expr(const GroundModel& gm, const Expr& e, std::span<const Value> bindings, Read& read) {
    using Op = Expr::Op;
    switch (e.op) {
        case Op::Null: return Value::null();
        case Op::Var: return bindings[static_cast<std::size_t>(e.index)];
        case Op::Literal: return e.literal;
        case Op::Apply: {
            std::array<Value, kMaxInputs> args;
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                args[i] = eval_expr(gm, e.args[i], bindings, read);
                if (args[i].is_null()) return Value::null();
            }
            const int fid = gm.network->function_family[static_cast<std::size_t>(e.index)];
            const auto& fam = gm.network->family(fid);
            const VarId v = gm.layout.var(fid, fam.arg_types, std::span<const Value>(args.data(), e.args.size()));
            return v == kNoVar ? Value::null() : read(v);
        }
        case Op::Less: {
            const Value a = eval_expr(gm, e.args[0], bindings, read);
            const Value b = eval_expr(gm, e.args[1], bindings, read);
            if (a.is_null() || b.is_null()) return Value::null();
            if (a.kind == Value::Kind::Real || b.kind == Value::Kind::Real) {
                auto num = [](const Value& v) { return v.kind == Value::Kind::Real ? v.as_real() : static_cast<double>(v.data); };
                return Value::boolean(num(a) < num(b));
            }
            return Value::boolean(a.data < b.data);
        }
        case Op::Eq:
        case Op::Neq: {
            const bool eq = loosely_equal(eval_expr(gm, e.args[0], bindings, read), eval_expr(gm, e.args[1], bindings, read));
            return Value::boolean(e.op == Op::Eq ? eq : !eq);
        }
        case Op::Add:
        case Op::Sub: {
            Value a = eval_expr(gm, e.args[0], bindings, read);
            const Value b = eval_expr(gm, e.args[1], bindings, read);
            if (a.is_null() || b.is_null()) return Value::null();
            a.data += e.op == Op::Add ? b.data : -b.data;
            return a;
        }
    }
    return Value::null();
}

template <class Read>
const CompiledClause* select_clause(const GroundModel& gm, const Family& fam, std::span<const Value> bindings, Read& read) {
    for (const auto& c : fam.clauses) {
        if (!c.condition || eval_expr(gm, *c.condition, bindings, read).truthy()) return &c;
    }
    return nullptr;
}

/// The conditional distribution of one variable given its parents' current values.
struct Measure {
    enum class Kind : std::uint8_t { Null, None, Scalar, Uniform, Atoms };

    Kind kind = Kind::Null;
    const ScalarDistribution* dist = nullptr;
    std::array<Value, kMaxInputs> inputs{};
    std::size_t n_inputs = 0;
    int type = -1;
    std::size_t count = 0;                     // Uniform
    const std::vector<double>* weights = nullptr;  // Atoms

    std::span<const Value> input_span() const { return {inputs.data(), n_inputs}; }

    bool finite() const { return kind != Kind::Scalar || dist->finite_support(); }

    double log_density(const Value& x) const {
        switch (kind) {
            case Kind::None: return 0.0;
            case Kind::Null: return x.is_null() ? 0.0 : kNegInf;
            case Kind::Scalar: return dist->log_density(input_span(), x);
            case Kind::Uniform:
                if (count == 0) return x.is_null() ? 0.0 : kNegInf;
                if (x.kind != Value::Kind::Obj || x.type != type || x.data < 0 || static_cast<std::size_t>(x.data) >= count) return kNegInf;
                return -std::log(static_cast<double>(count));
            case Kind::Atoms: {
                if (x.kind != Value::Kind::Obj || x.type != type || x.data < 0 || static_cast<std::size_t>(x.data) >= weights->size()) return kNegInf;
                const double w = (*weights)[static_cast<std::size_t>(x.data)];
                return w > 0.0 ? std::log(w) : kNegInf;
            }
        }
        return kNegInf;
    }

    void support(FiniteSupport& out) const {
        out.clear();
        switch (kind) {
            case Kind::None:
            case Kind::Null:
                out.values.push_back(Value::null());
                out.log_weights.push_back(0.0);
                return;
            case Kind::Scalar: dist->support(input_span(), out); return;
            case Kind::Uniform:
                if (count == 0) {
                    out.values.push_back(Value::null());
                    out.log_weights.push_back(0.0);
                    return;
                }
                for (std::size_t k = 0; k < count; ++k) {
                    out.values.push_back(Value::object(type, static_cast<std::int64_t>(k)));
                    out.log_weights.push_back(-std::log(static_cast<double>(count)));
                }
                return;
            case Kind::Atoms:
                for (std::size_t k = 0; k < weights->size(); ++k) {
                    out.values.push_back(Value::object(type, static_cast<std::int64_t>(k)));
                    const double w = (*weights)[k];
                    out.log_weights.push_back(w > 0.0 ? std::log(w) : kNegInf);
                }
                return;
        }
    }

    Value sample(Rng& rng) const {
        switch (kind) {
            case Kind::None:
            case Kind::Null: return Value::null();
            case Kind::Scalar: return dist->sample(input_span(), rng);
            case Kind::Uniform: {
                if (count == 0) return Value::null();
                auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(count));
                return Value::object(type, static_cast<std::int64_t>(std::min(k, count - 1)));
            }
            case Kind::Atoms: return Value::object(type, static_cast<std::int64_t>(sample_categorical(*weights, rng)));
        }
        return Value::null();
    }
};

namespace detail {

/// Families whose variables are forward sampled: number families and everything below them.
inline std::vector<char> number_descendants(const GenerativeNetwork& net) {
    std::vector<char> block(net.families.size(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t f = 0; f < net.families.size(); ++f) {
            if (block[f]) continue;
            const auto& fam = net.families[f];
            bool in = fam.kind == FamilyKind::Number;
            for (int p : fam.parents) in = in || block[static_cast<std::size_t>(p)];
            if (in) {
                block[f] = 1;
                changed = true;
            }
        }
    }
    return block;
}

inline std::string number_ancestor(const GenerativeNetwork& net, int family) {
    const auto& fam = net.family(family);
    if (fam.kind == FamilyKind::Number) return fam.name;
    const auto block = number_descendants(net);
    for (int p : fam.parents) {
        if (block[static_cast<std::size_t>(p)]) return number_ancestor(net, p);
    }
    return fam.name;
}

}  // namespace detail

namespace detail {

inline void condition_functions(const Expr& e, std::vector<int>& out) {
    if (e.op == Expr::Op::Apply) out.push_back(e.index);
    for (const auto& a : e.args) condition_functions(a, out);
}

/// gates[f][g]: a clause condition of family g reads family f.
inline std::vector<std::vector<char>> condition_gates(const GenerativeNetwork& net) {
    const std::size_t n = net.families.size();
    std::vector<std::vector<char>> gates(n, std::vector<char>(n, 0));
    std::vector<int> fns;
    for (std::size_t g = 0; g < n; ++g) {
        for (const auto& c : net.families[g].clauses) {
            if (!c.condition) continue;
            fns.clear();
            condition_functions(*c.condition, fns);
            for (int fn : fns) {
                const int f = net.function_family[static_cast<std::size_t>(fn)];
                if (f >= 0) gates[static_cast<std::size_t>(f)][g] = 1;
            }
        }
    }
    return gates;
}

}  // namespace detail

class Engine {
  public:
    Engine(std::shared_ptr<const GroundModel> gm, std::uint64_t seed) : gm_(std::move(gm)), rng_(seed) {
        const auto& net = *gm_->network;
        const auto& L = gm_->layout;
        const std::size_t n = L.num_vars;

        for (std::size_t i = 0; i < gm_->registry->size(); ++i) {
            dists_.push_back(dynamic_cast<const ScalarDistribution*>(&gm_->registry->at(i)));
        }
        check_forms();

        block_family_ = detail::number_descendants(net);
        gates_ = detail::condition_gates(net);
        for (const auto& [v, x] : gm_->observed) {
            if (block_family_[static_cast<std::size_t>(L.owner[v])]) {
                throw Error(ErrorCode::NumberStatementInference,
                            "evidence on " + gm_->var_name(v) + " depends on the number statement for " +
                                detail::number_ancestor(net, L.owner[v]) + "; only forward sampling is supported there");
            }
        }

        binding_offset_.resize(n + 1, 0);
        std::vector<Value> args;
        for (VarId v = 0; v < n; ++v) {
            const auto& fam = gm_->family_of(v);
            L.args_of(v, fam.arg_types, args);
            binding_offset_[v] = bindings_.size();
            bindings_.insert(bindings_.end(), args.begin(), args.end());
        }
        binding_offset_[n] = bindings_.size();

        for (VarId v = 0; v < n; ++v) {
            const int f = L.owner[v];
            const auto& fam = net.family(f);
            if (gm_->is_observed[v]) continue;
            if (block_family_[static_cast<std::size_t>(f)]) {
                block_vars_.push_back(v);
                continue;
            }
            switch (fam.kind) {
                case FamilyKind::Stick: stick_vars_.push_back(v); break;
                case FamilyKind::Collection: collection_vars_.push_back(v); break;
                case FamilyKind::Indicator: indicator_vars_.push_back(v); break;
                case FamilyKind::Attribute: attribute_vars_.push_back(v); break;
                default: break;
            }
        }

        state_.scalars.assign(n, Value::null());
        state_.vectors.assign(n, {});
        state_.atom_counts.assign(net.symbols.types.size(), {});
        state_.active.assign(net.symbols.types.size(), 0);
        for (std::size_t t = 0; t < net.symbols.types.size(); ++t) {
            if (net.stick_family[t] >= 0) state_.atom_counts[t].assign(L.extent[t], 0);
        }
        parents_.assign(n, {});
        children_.assign(n, {});
        stale_.assign(n, 0);
        visiting_.assign(n, 0);
    }

    const GroundModel& model() const { return *gm_; }
    const WorldState& state() const { return state_; }
    Rng& rng() { return rng_; }

    const std::vector<VarId>& children(VarId v) const { return children_[v]; }
    const std::vector<VarId>& parents(VarId v) const { return parents_[v]; }
    const std::vector<VarId>& indicator_vars() const { return indicator_vars_; }
    const std::vector<VarId>& attribute_vars() const { return attribute_vars_; }
    const std::vector<VarId>& forward_vars() const { return block_vars_; }

    /// Ancestral sampling of every unobserved variable, then the dependency index.
    void initialize() {
        const std::size_t n = gm_->layout.num_vars;
        for (const auto& [v, x] : gm_->observed) set_value(v, x);
        for (VarId v = 0; v < n; ++v) stale_[v] = gm_->is_observed[v] ? 0 : 1;
        for (VarId v = 0; v < n; ++v) ensure(v);
        for (VarId v = 0; v < n; ++v) retrace(v);
    }

    /// Redraws the variables below number statements from their prior.
    void forward_block() {
        if (block_vars_.empty()) return;
        for (VarId v : block_vars_) stale_[v] = 1;
        for (VarId v : block_vars_) ensure(v);
        for (VarId v : block_vars_) retrace(v);
    }

    void sweep_indicators() {
        for (VarId v : indicator_vars_) {
            update_scalar(v);
            joint_move(v);
        }
    }

    void sweep_attributes() {
        for (VarId v : attribute_vars_) {
            update_scalar(v);
            joint_move(v);
        }
    }

    /// Blocked stick update from indicator occupancy, then each collection from its own usage.
    void sweep_sticks() {
        const auto& net = *gm_->network;
        for (VarId s : stick_vars_) {
            const auto& fam = gm_->family_of(s);
            const auto& counts = state_.atom_counts[static_cast<std::size_t>(fam.type)];
            state_.vectors[s] = dp::stick_posterior_update(fam.alpha, dp::ClusterCounts(counts), rng_).weights;
        }
        std::vector<long> counts;
        for (VarId cv : collection_vars_) {
            const auto& fam = gm_->family_of(cv);
            const auto& stick = state_.vectors[stick_var(fam.type)];
            counts.assign(stick.size(), 0);
            for (VarId c : children_[cv]) {
                const Value& x = state_.scalars[c];
                if (x.kind == Value::Kind::Obj && x.type == fam.type) ++counts[static_cast<std::size_t>(x.data)];
            }
            dp::StickWeights pi{stick, net.family(net.stick_family[static_cast<std::size_t>(fam.type)]).alpha};
            state_.vectors[cv] = dp::dirichlet_collection_posterior(fam.alpha, pi, dp::ClusterCounts(counts), rng_);
        }
    }

    void iterate() {
        forward_block();
        sweep_indicators();
        sweep_attributes();
        sweep_sticks();
    }

    /// Active atoms of a stick type, or the drawn count of a number type.
    long count(int type) const {
        const auto t = static_cast<std::size_t>(type);
        const auto& net = *gm_->network;
        if (net.number_family[t] >= 0) {
            const Value& x = state_.scalars[number_var(type)];
            return x.is_null() ? 0 : static_cast<long>(x.data);
        }
        return state_.active[t];
    }

    /// Stick mass on atoms no indicator uses: the chance the next draw is a new object.
    double new_object_mass(int type) const {
        const auto t = static_cast<std::size_t>(type);
        if (gm_->network->stick_family[t] < 0) return std::nan("");
        const auto& pi = state_.vectors[stick_var(type)];
        const auto& counts = state_.atom_counts[t];
        double mass = 0.0;
        for (std::size_t k = 0; k < pi.size(); ++k) {
            if (counts[k] == 0) mass += pi[k];
        }
        return mass;
    }

    /// Occupancy recomputed from the indicator values alone.
    std::vector<std::vector<long>> recount() const {
        std::vector<std::vector<long>> out(state_.atom_counts.size());
        for (std::size_t t = 0; t < out.size(); ++t) out[t].assign(state_.atom_counts[t].size(), 0);
        for (VarId v = 0; v < gm_->layout.num_vars; ++v) {
            const auto& fam = gm_->family_of(v);
            if (fam.kind != FamilyKind::Indicator) continue;
            const Value& x = state_.scalars[v];
            auto& c = out[static_cast<std::size_t>(fam.type)];
            if (x.kind == Value::Kind::Obj && !c.empty()) ++c[static_cast<std::size_t>(x.data)];
        }
        return out;
    }

    double log_density(VarId v) {
        Ctx ctx;
        return measure(v, ctx).log_density(state_.scalars[v]);
    }

    Measure prior(VarId v) {
        Ctx ctx;
        return measure(v, ctx);
    }

    /// Sum of log densities of all scalar variables given their parents.
    double log_joint() {
        double lp = 0.0;
        for (VarId v = 0; v < gm_->layout.num_vars; ++v) {
            const auto kind = gm_->family_of(v).kind;
            if (kind == FamilyKind::Stick || kind == FamilyKind::Collection || kind == FamilyKind::Observed) continue;
            lp += log_density(v);
        }
        return lp;
    }

    VarId stick_var(int type) const {
        return gm_->layout.families[static_cast<std::size_t>(gm_->network->stick_family[static_cast<std::size_t>(type)])].offset;
    }
    VarId number_var(int type) const {
        return gm_->layout.families[static_cast<std::size_t>(gm_->network->number_family[static_cast<std::size_t>(type)])].offset;
    }

  private:
    struct Ctx {
        VarId override_var = kNoVar;
        Value override_value;
        std::vector<VarId>* reads = nullptr;
        bool forward = false;
    };

    void check_forms() const {
        for (const auto& fam : gm_->network->families) {
            for (const auto& c : fam.clauses) {
                if (c.body.inputs.size() > kMaxInputs || c.body.index.size() > kMaxInputs) {
                    throw Error(ErrorCode::UnsupportedForm, fam.name + ": too many arguments to a draw");
                }
                if (c.body.kind == CompiledDraw::Kind::Registry && !dists_[c.body.dist]) {
                    throw Error(ErrorCode::UnsupportedForm, fam.name + " draws from " + gm_->registry->at(c.body.dist).name() +
                                                                ", which is not a scalar distribution");
                }
            }
            if (fam.arg_types.size() > kMaxInputs) throw Error(ErrorCode::UnsupportedForm, fam.name + ": too many arguments");
        }
    }

    std::span<const Value> bindings(VarId v) const {
        return {bindings_.data() + binding_offset_[v], binding_offset_[v + 1] - binding_offset_[v]};
    }

    const Value& read(VarId v, Ctx& ctx) {
        if (ctx.reads) ctx.reads->push_back(v);
        if (v == ctx.override_var) return ctx.override_value;
        if (ctx.forward && stale_[v]) ensure(v);
        return state_.scalars[v];
    }

    const std::vector<double>& read_vector(VarId v, Ctx& ctx) {
        if (ctx.reads) ctx.reads->push_back(v);
        if (ctx.forward && stale_[v]) ensure(v);
        return state_.vectors[v];
    }

    Measure measure(VarId v, Ctx& ctx) {
        const auto& fam = gm_->family_of(v);
        Measure m;
        if (fam.kind == FamilyKind::Observed || fam.kind == FamilyKind::Stick || fam.kind == FamilyKind::Collection) {
            m.kind = Measure::Kind::None;
            if (fam.kind == FamilyKind::Collection) read_vector(stick_var(fam.type), ctx);
            return m;
        }
        auto reader = [&](VarId u) -> Value { return read(u, ctx); };
        const auto b = bindings(v);
        const CompiledClause* clause = select_clause(*gm_, fam, b, reader);
        if (!clause) return m;
        const auto& d = clause->body;
        switch (d.kind) {
            case CompiledDraw::Kind::Null: return m;
            case CompiledDraw::Kind::Registry:
                m.kind = Measure::Kind::Scalar;
                m.dist = dists_[d.dist];
                m.n_inputs = d.inputs.size();
                for (std::size_t i = 0; i < d.inputs.size(); ++i) m.inputs[i] = eval_expr(*gm_, d.inputs[i], b, reader);
                return m;
            case CompiledDraw::Kind::ExtensionUniform: {
                m.kind = Measure::Kind::Uniform;
                m.type = d.type;
                const auto t = static_cast<std::size_t>(d.type);
                if (gm_->network->number_family[t] >= 0) {
                    const Value& n = read(number_var(d.type), ctx);
                    m.count = n.is_null() || n.data < 0 ? 0 : std::min<std::size_t>(static_cast<std::size_t>(n.data), gm_->layout.extent[t]);
                } else {
                    m.count = gm_->layout.extent[t];
                }
                return m;
            }
            case CompiledDraw::Kind::Stick:
                m.kind = Measure::Kind::Atoms;
                m.type = d.type;
                m.weights = &read_vector(stick_var(d.type), ctx);
                return m;
            case CompiledDraw::Kind::Collection: {
                std::array<Value, kMaxInputs> idx;
                for (std::size_t i = 0; i < d.index.size(); ++i) {
                    idx[i] = eval_expr(*gm_, d.index[i], b, reader);
                    if (idx[i].is_null()) return m;
                }
                const int cf = gm_->network->function_family[static_cast<std::size_t>(d.function)];
                const VarId cv = gm_->layout.var(cf, gm_->network->family(cf).arg_types, std::span<const Value>(idx.data(), d.index.size()));
                if (cv == kNoVar) return m;
                m.kind = Measure::Kind::Atoms;
                m.type = d.type;
                m.weights = &read_vector(cv, ctx);
                return m;
            }
        }
        return m;
    }

    void set_value(VarId v, const Value& x) {
        Value& cur = state_.scalars[v];
        const auto& fam = gm_->family_of(v);
        if (fam.kind == FamilyKind::Indicator) {
            auto& counts = state_.atom_counts[static_cast<std::size_t>(fam.type)];
            if (!counts.empty()) {
                auto& active = state_.active[static_cast<std::size_t>(fam.type)];
                if (cur.kind == Value::Kind::Obj) {
                    if (--counts[static_cast<std::size_t>(cur.data)] == 0) --active;
                }
                if (x.kind == Value::Kind::Obj) {
                    if (counts[static_cast<std::size_t>(x.data)]++ == 0) ++active;
                }
            }
        }
        cur = x;
    }

    void ensure(VarId v) {
        if (!stale_[v]) return;
        if (visiting_[v]) throw Error(ErrorCode::CycleDetected, "cyclic dependency through " + gm_->var_name(v));
        visiting_[v] = 1;
        sample_prior(v);
        visiting_[v] = 0;
        stale_[v] = 0;
    }

    void sample_prior(VarId v) {
        const auto& fam = gm_->family_of(v);
        Ctx ctx;
        ctx.forward = true;
        switch (fam.kind) {
            case FamilyKind::Stick:
                state_.vectors[v] = dp::stick_breaking_sample(fam.alpha, gm_->layout.extent[static_cast<std::size_t>(fam.type)], rng_).weights;
                return;
            case FamilyKind::Collection: {
                const auto& net = *gm_->network;
                const auto& stick = read_vector(stick_var(fam.type), ctx);
                dp::StickWeights pi{stick, net.family(net.stick_family[static_cast<std::size_t>(fam.type)]).alpha};
                state_.vectors[v] = dp::dirichlet_collection_sample(fam.alpha, pi, rng_);
                return;
            }
            case FamilyKind::Observed: return;
            case FamilyKind::Number: {
                const Measure m = measure(v, ctx);
                Value x = m.sample(rng_);
                // draws above the grounding capacity are redrawn, then clamped
                for (int tries = 0; tries < 1000 && x.data > static_cast<std::int64_t>(fam.truncation); ++tries) x = m.sample(rng_);
                x.data = std::min<std::int64_t>(x.data, static_cast<std::int64_t>(fam.truncation));
                set_value(v, x);
                return;
            }
            default: {
                const Measure m = measure(v, ctx);
                set_value(v, m.sample(rng_));
                return;
            }
        }
    }

    void retrace(VarId c) {
        const auto kind = gm_->family_of(c).kind;
        if (kind == FamilyKind::Stick || kind == FamilyKind::Observed) return;
        reads_.clear();
        Ctx ctx;
        ctx.reads = &reads_;
        (void)measure(c, ctx);
        std::sort(reads_.begin(), reads_.end());
        reads_.erase(std::unique(reads_.begin(), reads_.end()), reads_.end());
        auto& old = parents_[c];
        if (old == reads_) return;
        for (VarId p : old) {
            auto& kids = children_[p];
            auto it = std::find(kids.begin(), kids.end(), c);
            if (it != kids.end()) {
                *it = kids.back();
                kids.pop_back();
            }
        }
        old = reads_;
        for (VarId p : old) children_[p].push_back(c);
    }

    struct Likelihood {
        double log = 0.0;
        long violations = 0;  // children with zero density
    };

    /// Stops early once more than `limit` children have zero density.
    Likelihood children_likelihood(VarId v, const Value& x, long limit = std::numeric_limits<long>::max()) {
        Likelihood out;
        Ctx ctx;
        ctx.override_var = v;
        ctx.override_value = x;
        for (VarId c : children_[v]) {
            const double d = measure(c, ctx).log_density(state_.scalars[c]);
            if (d == kNegInf) {
                if (++out.violations > limit) return out;
            } else {
                out.log += d;
            }
        }
        return out;
    }

    void change(VarId v, const Value& x) {
        if (state_.scalars[v] == x) return;
        set_value(v, x);
        kids_ = children_[v];
        for (VarId c : kids_) retrace(c);
    }

    // A world can start with zero likelihood (e.g. a confusion model whose
    // initial colours miss the evidence). Candidates are then ranked by how many
    // children they leave impossible before their likelihood counts; once every
    // child has positive density this is the exact Gibbs conditional.
    static constexpr double kViolationPenalty = 1e4;

    void update_scalar(VarId v) {
        Ctx ctx;
        const Measure m = measure(v, ctx);
        if (children_[v].empty()) {
            change(v, m.sample(rng_));
            return;
        }
        if (!m.finite()) {
            metropolis(v, m);
            return;
        }
        m.support(support_);
        logw_.resize(support_.values.size());
        long best = std::numeric_limits<long>::max();
        // the current value bounds the violations worth counting; anything worse
        // ends up with weight exp(-1e4), which is zero anyway
        if (m.log_density(state_.scalars[v]) != kNegInf) best = children_likelihood(v, state_.scalars[v]).violations;
        for (std::size_t i = 0; i < support_.values.size(); ++i) {
            const double prior = support_.log_weights[i];
            if (prior == kNegInf) {
                logw_[i] = kNegInf;
                continue;
            }
            const auto lik = children_likelihood(v, support_.values[i], best);
            if (lik.violations > best) {
                logw_[i] = kNegInf;
                continue;
            }
            best = lik.violations;
            logw_[i] = prior + lik.log - kViolationPenalty * static_cast<double>(lik.violations);
        }
        const std::size_t k = sample_log_categorical(logw_, rng_, scratch_);
        if (k < support_.values.size()) change(v, support_.values[k]);
    }

    // A variable read by another's clause condition can be locked to it: with
    // `Ref(d) if Hidden(d) = 1 then null`, neither Hidden nor Ref moves alone.
    // This move proposes v from its prior and redraws the gated children from
    // their new priors; both priors cancel, leaving the likelihood of everything
    // downstream.
    void joint_move(VarId v) {
        const auto f = static_cast<std::size_t>(gm_->layout.owner[v]);
        gated_.clear();
        for (VarId c : children_[v]) {
            const auto g = static_cast<std::size_t>(gm_->layout.owner[c]);
            const auto kind = gm_->network->family(static_cast<int>(g)).kind;
            if (gates_[f][g] && !gm_->is_observed[c] && !block_family_[g] &&
                (kind == FamilyKind::Indicator || kind == FamilyKind::Attribute)) {
                gated_.push_back(c);
            }
        }
        if (gated_.empty()) return;
        std::sort(gated_.begin(), gated_.end());

        auto blanket = [&] {
            for (VarId c : children_[v]) frontier_.push_back(c);
            for (VarId s : gated_) {
                for (VarId c : children_[s]) frontier_.push_back(c);
            }
        };
        auto score = [&] {
            Likelihood out;
            for (VarId t : frontier_) {
                const double d = log_density(t);
                if (d == kNegInf) ++out.violations;
                else out.log += d;
            }
            return out;
        };
        auto apply = [&](const std::vector<Value>& values) {
            change(v, values[0]);
            for (std::size_t i = 0; i < gated_.size(); ++i) change(gated_[i], values[i + 1]);
        };

        old_values_.assign(1, state_.scalars[v]);
        for (VarId s : gated_) old_values_.push_back(state_.scalars[s]);
        frontier_.clear();
        blanket();

        Ctx ctx;
        change(v, measure(v, ctx).sample(rng_));
        new_values_.assign(1, state_.scalars[v]);
        for (VarId s : gated_) {
            Ctx c2;
            change(s, measure(s, c2).sample(rng_));
            new_values_.push_back(state_.scalars[s]);
        }
        blanket();
        auto self = [&](VarId t) { return t == v || std::binary_search(gated_.begin(), gated_.end(), t); };
        frontier_.erase(std::remove_if(frontier_.begin(), frontier_.end(), self), frontier_.end());
        std::sort(frontier_.begin(), frontier_.end());
        frontier_.erase(std::unique(frontier_.begin(), frontier_.end()), frontier_.end());

        const auto next = score();
        apply(old_values_);
        const auto now = score();
        bool accept;
        if (next.violations != now.violations) {
            accept = next.violations < now.violations;
        } else {
            accept = std::log(uniform01(rng_)) < next.log - now.log;
        }
        if (accept) apply(new_values_);
    }

    /// Independence sampler proposing from the prior; the prior cancels.
    void metropolis(VarId v, const Measure& m) {
        const Value proposal = m.sample(rng_);
        const auto now = children_likelihood(v, state_.scalars[v]);
        const auto next = children_likelihood(v, proposal);
        bool accept;
        if (next.violations != now.violations) {
            accept = next.violations < now.violations;
        } else {
            accept = std::log(uniform01(rng_)) < next.log - now.log;
        }
        if (accept) change(v, proposal);
    }

    std::shared_ptr<const GroundModel> gm_;
    Rng rng_;
    WorldState state_;
    std::vector<const ScalarDistribution*> dists_;
    std::vector<char> block_family_;
    std::vector<std::vector<char>> gates_;
    std::vector<VarId> gated_, frontier_;
    std::vector<Value> old_values_, new_values_;
    std::vector<Value> bindings_;
    std::vector<std::size_t> binding_offset_;
    std::vector<VarId> stick_vars_, collection_vars_, indicator_vars_, attribute_vars_, block_vars_;
    std::vector<std::vector<VarId>> parents_, children_;
    std::vector<char> stale_, visiting_;
    std::vector<VarId> reads_, kids_;
    FiniteSupport support_;
    std::vector<double> logw_, scratch_;
};

}  // namespace npblog
