#include "iu/reward_lang.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace iu::reward {

const char* to_string(Atom a) {
    switch (a) {
        case Atom::Fist: return "fist";
        case Atom::Red: return "red";
        case Atom::Blue: return "blue";
        case Atom::Green: return "green";
        case Atom::Pad: return "pad";
    }
    return "?";
}

const char* to_string(Rel r) {
    switch (r) {
        case Rel::Near: return "near";
        case Rel::Far: return "far";
        case Rel::North: return "north";
        case Rel::East: return "east";
        case Rel::South: return "south";
        case Rel::West: return "west";
    }
    return "?";
}

int atom_rank(Atom a) { return static_cast<int>(a); }

bool is_symmetric(Rel r) { return r == Rel::Near || r == Rel::Far; }

bool RewardExpr::Node::operator==(const Node& o) const {
    if (kind != o.kind) return false;
    if (kind == Kind::Relation) return rel == o.rel && a == o.a && b == o.b;
    return children == o.children;
}

namespace {

struct Token {
    enum class Kind { Ident, LParen, RParen, Comma, End };
    Kind kind;
    std::string text;
    std::size_t offset;  // 1-based position of the first character
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::size_t at = pos_ + 1;
        if (pos_ >= text_.size()) return {Token::Kind::End, "", at};
        const char c = text_[pos_];
        if (c == '(') { ++pos_; return {Token::Kind::LParen, "(", at}; }
        if (c == ')') { ++pos_; return {Token::Kind::RParen, ")", at}; }
        if (c == ',') { ++pos_; return {Token::Kind::Comma, ",", at}; }
        if (std::islower(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::islower(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            return {Token::Kind::Ident, std::string(text_.substr(start, pos_ - start)), at};
        }
        throw ParseError(std::string("unexpected character '") + c + "'", at);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) { advance(); }

    RewardExpr parse_all() {
        RewardExpr e;
        e.root = parse_expr();
        if (cur_.kind != Token::Kind::End)
            throw ParseError("trailing input after expression", cur_.offset);
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    void expect(Token::Kind k, const char* what) {
        if (cur_.kind != k) throw ParseError(std::string("expected ") + what, cur_.offset);
        advance();
    }

    Atom parse_atom() {
        if (cur_.kind != Token::Kind::Ident) throw ParseError("expected an atom", cur_.offset);
        const std::string& s = cur_.text;
        Atom a;
        if (s == "fist") a = Atom::Fist;
        else if (s == "red") a = Atom::Red;
        else if (s == "blue") a = Atom::Blue;
        else if (s == "green") a = Atom::Green;
        else if (s == "pad") a = Atom::Pad;
        else throw ParseError("unknown atom '" + s + "'", cur_.offset);
        advance();
        return a;
    }

    RewardExpr::Node parse_expr() {
        if (cur_.kind != Token::Kind::Ident)
            throw ParseError("expected a relation or 'and'", cur_.offset);
        const std::string head = cur_.text;
        const std::size_t head_at = cur_.offset;
        if (head == "and") {
            advance();
            expect(Token::Kind::LParen, "'('");
            RewardExpr::Node node;
            node.kind = RewardExpr::Node::Kind::And;
            node.children.push_back(parse_expr());
            // conjunction requires at least two operands
            if (cur_.kind != Token::Kind::Comma)
                throw ParseError("'and' needs at least two operands", cur_.offset);
            while (cur_.kind == Token::Kind::Comma) {
                advance();
                node.children.push_back(parse_expr());
            }
            expect(Token::Kind::RParen, "')'");
            return node;
        }
        Rel rel;
        if (head == "near") rel = Rel::Near;
        else if (head == "far") rel = Rel::Far;
        else if (head == "north") rel = Rel::North;
        else if (head == "east") rel = Rel::East;
        else if (head == "south") rel = Rel::South;
        else if (head == "west") rel = Rel::West;
        else throw ParseError("unknown relation '" + head + "'", head_at);
        advance();
        expect(Token::Kind::LParen, "'('");
        RewardExpr::Node node;
        node.kind = RewardExpr::Node::Kind::Relation;
        node.rel = rel;
        node.a = parse_atom();
        if (cur_.kind != Token::Kind::Comma)
            throw ParseError("relation takes exactly two atoms", cur_.offset);
        advance();
        node.b = parse_atom();
        if (node.a == node.b)
            throw ParseError("relation atoms must be distinct", cur_.offset);
        expect(Token::Kind::RParen, "')'");
        return node;
    }

    Lexer lex_;
    Token cur_;
};

void print_node(std::ostream& os, const RewardExpr::Node& n) {
    if (n.kind == RewardExpr::Node::Kind::Relation) {
        Atom a = n.a, b = n.b;
        if (is_symmetric(n.rel) && atom_rank(a) > atom_rank(b)) std::swap(a, b);
        os << to_string(n.rel) << "(" << to_string(a) << "," << to_string(b) << ")";
    } else {
        os << "and(";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) os << ",";
            print_node(os, n.children[i]);
        }
        os << ")";
    }
}

void flatten(const RewardExpr::Node& n, std::vector<TaskSpec::RelCheck>& out) {
    if (n.kind == RewardExpr::Node::Kind::Relation) {
        out.push_back({n.rel, n.a, n.b});
    } else {
        for (const auto& c : n.children) flatten(c, out);
    }
}

Eigen::Vector2d atom_pos(Atom a, const room::WorldState& state) {
    switch (a) {
        case Atom::Fist:
            return state.fist_pos;
        case Atom::Pad:
            if (!state.pad_pos) throw EvalError("atom 'pad' is not present in this arena");
            return *state.pad_pos;
        default: {
            const char* want = to_string(a);
            for (const auto& b : state.blocks)
                if (std::string(room::to_string(b.color)) == want) return b.pos;
            throw EvalError(std::string("atom '") + want + "' is not present in this arena");
        }
    }
}

bool rel_holds(Rel rel, const Eigen::Vector2d& pa, const Eigen::Vector2d& pb, double eps) {
    switch (rel) {
        case Rel::Near: return (pa - pb).norm() < eps;
        case Rel::Far: return (pa - pb).norm() >= eps;
        case Rel::North: return pa.y() > pb.y();
        case Rel::East: return pa.x() > pb.x();
        case Rel::South: return pa.y() < pb.y();
        case Rel::West: return pa.x() < pb.x();
    }
    return false;
}

RewardExpr relation_expr(Rel r, Atom a, Atom b) {
    RewardExpr e;
    e.root.kind = RewardExpr::Node::Kind::Relation;
    e.root.rel = r;
    e.root.a = a;
    e.root.b = b;
    return e;
}

const std::vector<Rel> kAllRelations = {Rel::Near, Rel::Far, Rel::North,
                                        Rel::East, Rel::South, Rel::West};

}  // namespace

RewardExpr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string canonical_name(const RewardExpr& e) {
    std::ostringstream os;
    print_node(os, e.root);
    return os.str();
}

TaskSpec TaskSpec::compile(const RewardExpr& e, double epsilon_m) {
    TaskSpec t;
    t.name = canonical_name(e);
    t.expr = e;
    t.epsilon_m = epsilon_m;
    flatten(e.root, t.compiled);
    return t;
}

TaskSpec TaskSpec::compile(std::string_view text, double epsilon_m) {
    return compile(parse(text), epsilon_m);
}

double TaskSpec::evaluate(const room::WorldState& state) const {
    for (const auto& c : compiled)
        if (!rel_holds(c.rel, atom_pos(c.a, state), atom_pos(c.b, state), epsilon_m)) return 0.0;
    return 1.0;
}

std::string resolve_task_alias(const std::string& name) {
    if (name == "gather_to_pad") return "and(near(red,pad),near(blue,pad),near(green,pad))";
    return name;
}

std::vector<TaskSpec> enumerate_pairwise_tasks(const std::vector<Atom>& atoms,
                                               const std::vector<Rel>& relations,
                                               double epsilon_m) {
    if (atoms.size() < 2) throw ConfigError("task enumeration needs at least two atoms");
    std::vector<TaskSpec> out;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (std::size_t j = i + 1; j < atoms.size(); ++j) {
            Atom a = atoms[i], b = atoms[j];
            if (atom_rank(a) > atom_rank(b)) std::swap(a, b);
            for (Rel r : relations)
                out.push_back(TaskSpec::compile(relation_expr(r, a, b), epsilon_m));
        }
    }
    return out;
}

Suite suite_from_string(const std::string& s) {
    if (s == "suite18") return Suite::Suite18;
    if (s == "suite36") return Suite::Suite36;
    if (s == "suite7") return Suite::Suite7;
    if (s == "suite43") return Suite::Suite43;
    if (s == "custom") return Suite::Custom;
    throw ConfigError("unknown suite '" + s + "'");
}

const char* to_string(Suite s) {
    switch (s) {
        case Suite::Suite18: return "suite18";
        case Suite::Suite36: return "suite36";
        case Suite::Suite7: return "suite7";
        case Suite::Suite43: return "suite43";
        case Suite::Custom: return "custom";
    }
    return "?";
}

std::vector<TaskSpec> build_suite(Suite s, double epsilon_m) {
    const std::vector<Atom> two = {Atom::Fist, Atom::Red, Atom::Blue};
    const std::vector<Atom> three = {Atom::Fist, Atom::Red, Atom::Blue, Atom::Green};
    const std::vector<Atom> colors = {Atom::Red, Atom::Blue, Atom::Green};
    switch (s) {
        case Suite::Suite18:
            return enumerate_pairwise_tasks(two, kAllRelations, epsilon_m);
        case Suite::Suite36:
            return enumerate_pairwise_tasks(three, kAllRelations, epsilon_m);
        case Suite::Suite7: {
            std::vector<TaskSpec> out;
            out.push_back(TaskSpec::compile(parse(resolve_task_alias("gather_to_pad")), epsilon_m));
            for (Atom c : colors)
                out.push_back(
                    TaskSpec::compile(relation_expr(Rel::Near, c, Atom::Pad), epsilon_m));
            for (Atom c : colors)
                out.push_back(
                    TaskSpec::compile(relation_expr(Rel::Near, Atom::Fist, c), epsilon_m));
            return out;
        }
        case Suite::Suite43: {
            std::vector<TaskSpec> out = enumerate_pairwise_tasks(three, kAllRelations, epsilon_m);
            for (Atom c : colors) {
                out.push_back(TaskSpec::compile(relation_expr(Rel::Near, c, Atom::Pad), epsilon_m));
                out.push_back(TaskSpec::compile(relation_expr(Rel::Far, c, Atom::Pad), epsilon_m));
            }
            out.push_back(TaskSpec::compile(parse(resolve_task_alias("gather_to_pad")), epsilon_m));
            return out;
        }
        case Suite::Custom:
            throw ConfigError("custom suites are built from an explicit task list");
    }
    throw ConfigError("unhandled suite");
}

Eigen::VectorXd reward_vector(const std::vector<TaskSpec>& tasks, const room::WorldState& state) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(tasks.size()));
    for (std::size_t i = 0; i < tasks.size(); ++i) r(static_cast<Eigen::Index>(i)) = tasks[i].evaluate(state);
    return r;
}

void validate_tasks(const std::vector<TaskSpec>& tasks, const room::ArenaConfig& cfg) {
    auto has_color = [&](room::Color c) {
        return std::find(cfg.colors.begin(), cfg.colors.end(), c) != cfg.colors.end();
    };
    for (const auto& t : tasks) {
        for (const auto& chk : t.compiled) {
            for (Atom a : {chk.a, chk.b}) {
                switch (a) {
                    case Atom::Fist: break;
                    case Atom::Pad:
                        if (!cfg.pad)
                            throw ConfigError("task '" + t.name + "' needs a pad, arena has none");
                        break;
                    case Atom::Red:
                        if (!has_color(room::Color::Red))
                            throw ConfigError("task '" + t.name + "' needs a red block");
                        break;
                    case Atom::Blue:
                        if (!has_color(room::Color::Blue))
                            throw ConfigError("task '" + t.name + "' needs a blue block");
                        break;
                    case Atom::Green:
                        if (!has_color(room::Color::Green))
                            throw ConfigError("task '" + t.name + "' needs a green block");
                        break;
                }
            }
        }
    }
}

std::vector<TaskSpec> parse_task_lines(const std::string& text, double epsilon_m) {
    std::vector<TaskSpec> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        out.push_back(TaskSpec::compile(
            parse(resolve_task_alias(line.substr(first, last - first + 1))), epsilon_m));
    }
    return out;
}

int find_task(const std::vector<TaskSpec>& tasks, const std::string& name_or_alias) {
    const std::string name = resolve_task_alias(name_or_alias);
    for (std::size_t i = 0; i < tasks.size(); ++i)
        if (tasks[i].name == name) return static_cast<int>(i);
    return -1;
}

}  // namespace iu::reward
