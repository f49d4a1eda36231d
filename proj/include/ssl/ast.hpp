#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssl/diag.hpp"

namespace ssl {

// Types ---------------------------------------------------------------------

enum class TypeKind {
    Internal, // +{ l : A, ... }
    External, // &{ l : A, ... }
    One,      // 1
    Var,      // type name
};

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct TypeBranch {
    std::string label;
    TypePtr type;
};

struct Type {
    TypeKind kind;
    std::vector<TypeBranch> branches; // Internal/External, in source order
    std::string var;                  // Var
    Span span;
};

TypePtr mk_internal(std::vector<TypeBranch> branches, Span span = {});
TypePtr mk_external(std::vector<TypeBranch> branches, Span span = {});
TypePtr mk_one(Span span = {});
TypePtr mk_var(std::string name, Span span = {});

const TypeBranch* find_branch(const Type& t, const std::string& label);

// Exact structural identity, branch order sensitive. Used for round-trip
// checks and configuration linking; the checker's semantic equality lives
// in typecheck.hpp.
bool type_identical(const TypePtr& a, const TypePtr& b);

// Signatures ----------------------------------------------------------------

enum class Polarity { Mu, Nu };

struct SigEntry {
    std::string name;
    int priority = 0;
    Polarity polarity = Polarity::Mu;
    TypePtr body;
    Span span;
};

struct Signature {
    std::vector<SigEntry> entries; // source order

    const SigEntry* find(const std::string& name) const;
    int max_priority() const;            // 0 for an empty signature
    std::vector<int> priorities() const; // distinct, ascending
    // Polarity of a priority slot; nullopt if no entry uses it.
    std::optional<Polarity> polarity_at(int priority) const;
};

// Both require the name to be present; they throw std::out_of_range otherwise.
Polarity polarity_of(const Signature& sig, const std::string& name);
int priority_of(const Signature& sig, const std::string& name);

// Processes -----------------------------------------------------------------

enum class ProcKind {
    Forward,        // fwd
    Cut,            // x : A <- P ; Q
    SendLabelRight, // R.k; P
    CaseLeft,       // caseL( l => P | ... )
    SendLabelLeft,  // L.k; P
    CaseRight,      // caseR( l => P | ... )
    CloseRight,     // closeR
    WaitLeft,       // waitL; P
    SendMuRight,    // R.mu_t; P
    CaseMuLeft,     // caseL(mu_t => P)
    SendNuLeft,     // L.nu_t; P
    CaseNuRight,    // caseR(nu_t => P)
    Call,           // call X / call X x
};

struct Proc;
using ProcPtr = std::shared_ptr<const Proc>;

struct ProcBranch {
    std::string label;
    ProcPtr body;
    Span span;
};

struct Proc {
    ProcKind kind;
    Span span;

    std::string label;                   // SendLabelRight/SendLabelLeft
    std::string type_var;                // the four unfold forms
    ProcPtr cont;                        // unary continuations
    std::vector<ProcBranch> branches;    // CaseLeft/CaseRight

    std::string cut_channel;             // Cut
    TypePtr cut_type;                    // Cut
    ProcPtr cut_head, cut_tail;          // Cut

    std::string callee;                  // Call
    std::optional<std::string> call_arg; // Call, kept as written
};

bool proc_identical(const ProcPtr& a, const ProcPtr& b);

// Definitions and programs --------------------------------------------------

struct ProcDef {
    std::string name;
    std::optional<TypePtr> left; // nullopt: empty left context ('.')
    TypePtr right;
    ProcPtr body;
    // Synthesized channel names, distinct from every cut binder in the body.
    std::string left_port, right_port;
    Span span;
};

enum class OrderRel { Less, Equiv };

// One comma-separated item of an order declaration: a chain like
// `X < Y ~ Z`, or a bare name (empty rels).
struct OrderChain {
    std::vector<std::string> names;
    std::vector<OrderRel> rels; // rels.size() == names.size() - 1
    Span span;
};

struct OrderDecl {
    int family = 0;
    std::vector<OrderChain> chains;
    Span span;
};

struct Program {
    Signature sig;
    std::vector<ProcDef> defs;
    std::vector<OrderDecl> orders;
    std::optional<std::string> main_name;
    Span main_span;

    const ProcDef* find_def(const std::string& name) const;
};

bool program_identical(const Program& a, const Program& b);

// Well-formedness of names, priorities, and order declarations.
// Typing is separate (typecheck.hpp).
Diags validate_program(const Program& p);

} // namespace ssl
