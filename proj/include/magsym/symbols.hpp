#ifndef MAGSYM_SYMBOLS_HPP
#define MAGSYM_SYMBOLS_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "magsym/errors.hpp"

namespace magsym {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

using VarId = int;

enum class Reality { Real, Complex };

/// What a polynomial-ring variable stands for.
enum class VarKind {
    Coordinate, // x1 x2 x3 r u Z (phi exists but never enters the ring)
    Hbar,
    Parameter,   // declared coupling constants, separation constants, ...
    UFuncAtom,   // an uninterpreted function instance, e.g. mu''(Z)
    ExpAtom,     // exp(<canonical argument>)
    LnAtom,      // ln(<coordinate>)
    Momentum,    // p1 p2 p3 in momentum-polynomial specs; classical momenta
};

struct FuncInfo {
    std::string name;
    std::vector<VarId> arg_coords; // single coordinate symbols
    Reality reality = Reality::Real;
};

struct VarInfo {
    std::string name;    // display name
    VarKind kind;
    Reality reality = Reality::Real;
    int klass = 0;       // ordering class, see VarTable::rank_less
    std::string sort_key; // tie-break inside a class

    // UFuncAtom payload
    int func_id = -1;
    std::vector<int> deriv; // one entry per function argument

    // ExpAtom / LnAtom payload
    ExprPtr fn_arg;

    // conjugate pairing for complex parameters / complex ufuncs
    VarId conj_var = -1;
};

/// Process-wide registry of ring variables and uninterpreted functions.
///
/// Ordering of variables is intrinsic (class rank, then name), not
/// registration order, so canonical forms do not depend on the order in
/// which symbols were first seen: x1 < x2 < x3 < r < u < Z < hbar <
/// parameters (alphabetically) < atoms < momenta.
class VarTable {
  public:
    static VarTable& instance() {
        static VarTable t;
        return t;
    }

    // Fixed coordinates; registered in the constructor.
    VarId x1, x2, x3, r, u, Z, phi, hbar;
    VarId p1, p2, p3; // momentum tokens

    VarId parameter(const std::string& name, Reality reality) {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = by_name_.find(name);
        if (it != by_name_.end()) {
            VarInfo& vi = vars_[it->second];
            if (vi.kind != VarKind::Parameter)
                throw Error("identifier '" + name + "' is not a parameter");
            vi.reality = reality; // latest declaration wins
            return it->second;
        }
        VarInfo vi;
        vi.name = name;
        vi.kind = VarKind::Parameter;
        vi.reality = reality;
        vi.klass = 7;
        vi.sort_key = name;
        return add_locked(vi);
    }

    std::optional<VarId> lookup(const std::string& name) const {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = by_name_.find(name);
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    /// Conjugate partner of a complex parameter (auto-created "<name>_bar").
    VarId conj_parameter(VarId id) {
        std::lock_guard<std::mutex> lk(mu_);
        VarInfo& vi = vars_[id];
        if (vi.conj_var >= 0) return vi.conj_var;
        std::string base = vi.name;
        std::string cname = base.size() > 4 && base.ends_with("_bar")
                                ? base.substr(0, base.size() - 4)
                                : base + "_bar";
        VarInfo cv;
        cv.name = cname;
        cv.kind = VarKind::Parameter;
        cv.reality = Reality::Complex;
        cv.klass = 7;
        cv.sort_key = cname;
        VarId cid;
        auto it = by_name_.find(cname);
        if (it != by_name_.end())
            cid = it->second;
        else
            cid = add_locked(cv);
        vars_[id].conj_var = cid;
        vars_[cid].conj_var = id;
        return cid;
    }

    int declare_func(const std::string& name, std::vector<VarId> args,
                     Reality reality = Reality::Real) {
        std::lock_guard<std::mutex> lk(mu_);
        for (size_t i = 0; i < funcs_.size(); ++i)
            if (funcs_[i].name == name) return static_cast<int>(i);
        funcs_.push_back(FuncInfo{name, std::move(args), reality});
        return static_cast<int>(funcs_.size() - 1);
    }

    std::optional<int> lookup_func(const std::string& name) const {
        std::lock_guard<std::mutex> lk(mu_);
        for (size_t i = 0; i < funcs_.size(); ++i)
            if (funcs_[i].name == name) return static_cast<int>(i);
        return std::nullopt;
    }

    const FuncInfo& func(int id) const { return funcs_[id]; }

    /// Ring atom for a derivative instance of an uninterpreted function.
    VarId ufunc_atom(int func_id, const std::vector<int>& deriv) {
        std::lock_guard<std::mutex> lk(mu_);
        const FuncInfo& f = funcs_[func_id];
        if (deriv.size() != f.arg_coords.size())
            throw Error("derivative multi-index length mismatch for " + f.name);
        std::string key = "@u:" + f.name;
        for (int d : deriv) key += ":" + std::to_string(d);
        auto it = by_name_.find(key);
        if (it != by_name_.end()) return it->second;
        VarInfo vi;
        vi.name = display_ufunc(f, deriv);
        vi.kind = VarKind::UFuncAtom;
        vi.reality = f.reality;
        vi.klass = 8;
        vi.sort_key = key;
        vi.func_id = func_id;
        vi.deriv = deriv;
        return add_locked(vi, key);
    }

    /// `dep_coords` lists the coordinates the argument depends on; needed
    /// for the chain rule at normal-form level.
    VarId exp_atom(const std::string& canon_arg, ExprPtr arg,
                   std::vector<int> dep_coords) {
        std::lock_guard<std::mutex> lk(mu_);
        std::string key = "@e:" + canon_arg;
        auto it = by_name_.find(key);
        if (it != by_name_.end()) return it->second;
        VarInfo vi;
        vi.name = "exp(" + canon_arg + ")";
        vi.kind = VarKind::ExpAtom;
        vi.reality = Reality::Complex;
        vi.klass = 8;
        vi.sort_key = key;
        vi.fn_arg = std::move(arg);
        vi.deriv = std::move(dep_coords); // coordinate dependencies
        return add_locked(vi, key);
    }

    VarId ln_atom(VarId coord) {
        std::lock_guard<std::mutex> lk(mu_);
        std::string key = "@l:" + vars_[coord].name;
        auto it = by_name_.find(key);
        if (it != by_name_.end()) return it->second;
        VarInfo vi;
        vi.name = "ln(" + vars_[coord].name + ")";
        vi.kind = VarKind::LnAtom;
        vi.reality = Reality::Real;
        vi.klass = 8;
        vi.sort_key = key;
        vi.func_id = coord; // reuse: the coordinate under the log
        return add_locked(vi, key);
    }

    const VarInfo& info(VarId id) const { return vars_[id]; }
    const std::string& name(VarId id) const { return vars_[id].name; }

    bool rank_less(VarId a, VarId b) const {
        const VarInfo& va = vars_[a];
        const VarInfo& vb = vars_[b];
        if (va.klass != vb.klass) return va.klass < vb.klass;
        return va.sort_key < vb.sort_key;
    }

    size_t size() const { return vars_.size(); }

    std::vector<std::string> known_names() const {
        std::lock_guard<std::mutex> lk(mu_);
        std::vector<std::string> out;
        for (const auto& v : vars_)
            if (v.kind == VarKind::Coordinate || v.kind == VarKind::Parameter ||
                v.kind == VarKind::Hbar)
                out.push_back(v.name);
        for (const auto& f : funcs_) out.push_back(f.name);
        return out;
    }

  private:
    VarTable() {
        auto coord = [&](const std::string& n, int klass) {
            VarInfo vi;
            vi.name = n;
            vi.kind = VarKind::Coordinate;
            vi.reality = Reality::Real;
            vi.klass = klass;
            vi.sort_key = n;
            return add_locked(vi);
        };
        x1 = coord("x1", 0);
        x2 = coord("x2", 1);
        x3 = coord("x3", 2);
        r = coord("r", 3);
        u = coord("u", 4);
        Z = coord("Z", 5);
        phi = coord("phi", 9); // never a ring variable; UFunc arg only
        VarInfo h;
        h.name = "hbar";
        h.kind = VarKind::Hbar;
        h.reality = Reality::Real;
        h.klass = 6;
        h.sort_key = "hbar";
        hbar = add_locked(h);
        auto mom = [&](const std::string& n) {
            VarInfo vi;
            vi.name = n;
            vi.kind = VarKind::Momentum;
            vi.reality = Reality::Real;
            vi.klass = 10;
            vi.sort_key = n;
            return add_locked(vi);
        };
        p1 = mom("p1");
        p2 = mom("p2");
        p3 = mom("p3");
    }

    static std::string display_ufunc(const FuncInfo& f,
                                     const std::vector<int>& deriv) {
        std::string s = f.name;
        if (f.arg_coords.size() == 1) {
            for (int k = 0; k < deriv[0]; ++k) s += "'";
        } else {
            bool any = false;
            for (int d : deriv)
                if (d) any = true;
            if (any) {
                s += "_{";
                for (size_t i = 0; i < deriv.size(); ++i) {
                    if (i) s += ",";
                    s += std::to_string(deriv[i]);
                }
                s += "}";
            }
        }
        s += "(";
        for (size_t i = 0; i < f.arg_coords.size(); ++i) {
            if (i) s += ",";
            s += VarTable::instance().vars_[f.arg_coords[i]].name;
        }
        s += ")";
        return s;
    }

    VarId add_locked(const VarInfo& vi) { return add_locked(vi, vi.name); }
    VarId add_locked(const VarInfo& vi, const std::string& key) {
        vars_.push_back(vi);
        VarId id = static_cast<VarId>(vars_.size() - 1);
        by_name_[key] = id;
        if (key != vi.name) by_name_.emplace(vi.name, id);
        return id;
    }

    mutable std::mutex mu_;
    std::vector<VarInfo> vars_;
    std::map<std::string, VarId> by_name_;
    std::vector<FuncInfo> funcs_;
};

inline VarTable& vars() { return VarTable::instance(); }

} // namespace magsym

#endif
