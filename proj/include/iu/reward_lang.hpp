#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "iu/errors.hpp"
#include "iu/playroom.hpp"

namespace iu::reward {

enum class Atom { Fist, Red, Blue, Green, Pad };
enum class Rel { Near, Far, North, East, South, West };

const char* to_string(Atom a);
const char* to_string(Rel r);
// fist < red < blue < green < pad; fixes the canonical operand order of
// symmetric relations and the pair order of suite enumeration
int atom_rank(Atom a);
bool is_symmetric(Rel r);

// AST of the reward grammar:
//   expr     := relation | 'and' '(' expr (',' expr)+ ')'
//   relation := relname '(' atom ',' atom ')'
struct RewardExpr {
    struct Node {
        enum class Kind { Relation, And };
        Kind kind = Kind::Relation;
        Rel rel = Rel::Near;
        Atom a = Atom::Fist;
        Atom b = Atom::Fist;
        std::vector<Node> children;

        bool operator==(const Node& o) const;
    };
    Node root;

    bool operator==(const RewardExpr& o) const { return root == o.root; }
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t offset_1based)
        : std::runtime_error(msg + " at offset " + std::to_string(offset_1based)),
          offset(offset_1based) {}
    std::size_t offset;
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Whitespace-insensitive; tokens are lowercase and case-sensitive. Offsets in
// errors are 1-based character positions.
RewardExpr parse(std::string_view text);

// Symmetric relations print their atoms in declaration order; directional
// relations keep the order they were written with.
std::string canonical_name(const RewardExpr& e);

// A compiled task: the whole grammar denotes conjunctions of binary
// relations, so evaluation runs over a flat relation list.
struct TaskSpec {
    std::string name;  // canonical serialization of expr
    RewardExpr expr;
    double epsilon_m = 0.20;  // near/far threshold

    struct RelCheck {
        Rel rel;
        Atom a;
        Atom b;
    };
    std::vector<RelCheck> compiled;

    static TaskSpec compile(const RewardExpr& e, double epsilon_m = 0.20);
    static TaskSpec compile(std::string_view text, double epsilon_m = 0.20);

    // strict inequalities: coincident coordinates satisfy neither direction,
    // distance exactly epsilon counts as far
    double evaluate(const room::WorldState& state) const;
};

// "gather_to_pad" -> the three-color conjunction; other names pass through.
std::string resolve_task_alias(const std::string& name);

// One task per unordered atom pair and relation; pairs follow declaration
// order, directional relations use the canonical atom order.
std::vector<TaskSpec> enumerate_pairwise_tasks(const std::vector<Atom>& atoms,
                                               const std::vector<Rel>& relations,
                                               double epsilon_m = 0.20);

enum class Suite { Suite18, Suite36, Suite7, Suite43, Custom };
Suite suite_from_string(const std::string& s);
const char* to_string(Suite s);

// Suite18/36: all six relations over {fist,colors}. Suite7: gather_to_pad,
// near(color,pad) x3, near(fist,color) x3. Suite43: the 36 pairwise tasks,
// near/far(color,pad) x3 and gather_to_pad.
std::vector<TaskSpec> build_suite(Suite s, double epsilon_m = 0.20);

// Component i is tasks[i] evaluated on the state.
Eigen::VectorXd reward_vector(const std::vector<TaskSpec>& tasks, const room::WorldState& state);

// Every atom a task references must exist in the arena.
void validate_tasks(const std::vector<TaskSpec>& tasks, const room::ArenaConfig& cfg);

// Task files: one expression per line, '#' comments, blank lines ignored.
std::vector<TaskSpec> parse_task_lines(const std::string& text, double epsilon_m = 0.20);

int find_task(const std::vector<TaskSpec>& tasks, const std::string& name_or_alias);

}  // namespace iu::reward
