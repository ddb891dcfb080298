#include "coopreg/scenario_io.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>
#include <vector>

namespace coopreg::scenario_io {

namespace {

// ---------------------------------------------------------------------------
// Minimal TOML-style document model: tables, arrays of tables, typed values.
// Supports the subset the scenario format uses; nothing more.
// ---------------------------------------------------------------------------

struct Value;
using Array = std::vector<Value>;

struct Value {
    enum class Kind { integer, real, boolean, string, array };
    Kind kind = Kind::integer;
    std::int64_t int_v = 0;
    std::uint64_t uint_v = 0; // valid when the literal had no sign
    bool has_uint = false;
    double real_v = 0.0;
    bool bool_v = false;
    std::string str_v;
    Array array_v;
    int line = 0;
    int col = 0;
};

struct Table {
    std::map<std::string, Value> values;
    std::map<std::string, Table> tables;
    std::map<std::string, std::vector<Table>> table_arrays;
    int line = 0;
};

[[noreturn]] void parse_fail(const std::string& source, int line, int col,
                             const std::string& what) {
    std::ostringstream msg;
    msg << source << ":" << line << ":" << col << ": " << what;
    raise(Errc::parse_error, msg.str());
}

class Lexer {
public:
    Lexer(const std::string& text, std::string source)
        : text_(text), source_(std::move(source)) {}

    bool eof() const { return pos_ >= text_.size(); }
    int line() const { return line_; }
    int col() const { return static_cast<int>(pos_ - line_start_) + 1; }
    const std::string& source() const { return source_; }

    char peek() const { return text_[pos_]; }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            line_start_ = pos_;
        }
        return c;
    }

    // Skips spaces, tabs, and comments; newlines only when `newlines` is set.
    void skip_ws(bool newlines) {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else if (c == '\n' && newlines) {
                advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        parse_fail(source_, line_, col(), what);
    }

private:
    const std::string& text_;
    std::string source_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    int line_ = 1;
};

bool is_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_key(Lexer& lex) {
    std::string key;
    while (!lex.eof() && is_key_char(lex.peek())) key.push_back(lex.advance());
    if (key.empty()) lex.fail("expected a key");
    return key;
}

Value parse_value(Lexer& lex);

Value parse_array(Lexer& lex) {
    Value out;
    out.kind = Value::Kind::array;
    out.line = lex.line();
    out.col = lex.col();
    lex.advance(); // consume '['
    lex.skip_ws(true);
    if (!lex.eof() && lex.peek() == ']') {
        lex.advance();
        return out;
    }
    while (true) {
        out.array_v.push_back(parse_value(lex));
        lex.skip_ws(true);
        if (lex.eof()) lex.fail("unterminated array");
        char c = lex.peek();
        if (c == ',') {
            lex.advance();
            lex.skip_ws(true);
            if (!lex.eof() && lex.peek() == ']') { // trailing comma
                lex.advance();
                return out;
            }
        } else if (c == ']') {
            lex.advance();
            return out;
        } else {
            lex.fail("expected ',' or ']' in array");
        }
    }
}

Value parse_string(Lexer& lex) {
    Value out;
    out.kind = Value::Kind::string;
    out.line = lex.line();
    out.col = lex.col();
    lex.advance(); // consume '"'
    while (true) {
        if (lex.eof()) lex.fail("unterminated string");
        char c = lex.advance();
        if (c == '"') break;
        if (c == '\n') lex.fail("newline in string");
        if (c == '\\') {
            if (lex.eof()) lex.fail("unterminated escape");
            char esc = lex.advance();
            switch (esc) {
                case '"': out.str_v.push_back('"'); break;
                case '\\': out.str_v.push_back('\\'); break;
                case 'n': out.str_v.push_back('\n'); break;
                case 't': out.str_v.push_back('\t'); break;
                default: lex.fail("unsupported escape sequence");
            }
        } else {
            out.str_v.push_back(c);
        }
    }
    return out;
}

Value parse_scalar(Lexer& lex) {
    Value out;
    out.line = lex.line();
    out.col = lex.col();
    std::string token;
    while (!lex.eof()) {
        char c = lex.peek();
        if (c == ',' || c == ']' || c == '\n' || c == '#' || c == ' ' || c == '\t' || c == '\r')
            break;
        token.push_back(lex.advance());
    }
    if (token.empty()) lex.fail("expected a value");
    if (token == "true" || token == "false") {
        out.kind = Value::Kind::boolean;
        out.bool_v = (token == "true");
        return out;
    }

    bool looks_integer = true;
    for (std::size_t i = 0; i < token.size(); ++i) {
        char c = token[i];
        if (i == 0 && (c == '+' || c == '-')) continue;
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            looks_integer = false;
            break;
        }
    }
    errno = 0;
    char* end = nullptr;
    if (looks_integer) {
        out.kind = Value::Kind::integer;
        out.int_v = std::strtoll(token.c_str(), &end, 10);
        const bool overflow_signed = (errno == ERANGE);
        if (end != token.c_str() + token.size())
            parse_fail(lex.source(), out.line, out.col, "malformed integer '" + token + "'");
        if (token[0] != '-') {
            errno = 0;
            out.uint_v = std::strtoull(token.c_str(), &end, 10);
            out.has_uint = (errno != ERANGE);
            if (overflow_signed && out.has_uint)
                out.int_v = static_cast<std::int64_t>(out.uint_v); // representable as u64 only
        } else if (overflow_signed) {
            parse_fail(lex.source(), out.line, out.col, "integer out of range '" + token + "'");
        }
        out.real_v = static_cast<double>(out.int_v);
        return out;
    }
    out.kind = Value::Kind::real;
    out.real_v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size())
        parse_fail(lex.source(), out.line, out.col, "malformed number '" + token + "'");
    return out;
}

Value parse_value(Lexer& lex) {
    lex.skip_ws(false);
    if (lex.eof()) lex.fail("expected a value");
    char c = lex.peek();
    if (c == '[') return parse_array(lex);
    if (c == '"') return parse_string(lex);
    return parse_scalar(lex);
}

std::vector<std::string> split_path(const std::string& path, Lexer& lex) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : path) {
        if (c == '.') {
            if (cur.empty()) lex.fail("empty path segment in table header");
            parts.push_back(cur);
            cur.clear();
        } else if (is_key_char(c)) {
            cur.push_back(c);
        } else {
            lex.fail("invalid character in table header");
        }
    }
    if (cur.empty()) lex.fail("empty path segment in table header");
    parts.push_back(cur);
    return parts;
}

Table parse_document(const std::string& text, const std::string& source) {
    Lexer lex(text, source);
    Table root;
    Table* current = &root;

    while (true) {
        lex.skip_ws(true);
        if (lex.eof()) break;
        char c = lex.peek();
        if (c == '[') {
            const int hline = lex.line();
            lex.advance();
            bool is_array = false;
            if (!lex.eof() && lex.peek() == '[') {
                is_array = true;
                lex.advance();
            }
            std::string path;
            while (!lex.eof() && lex.peek() != ']') path.push_back(lex.advance());
            if (lex.eof()) lex.fail("unterminated table header");
            lex.advance(); // ']'
            if (is_array) {
                if (lex.eof() || lex.peek() != ']') lex.fail("expected ']]' closing table array");
                lex.advance();
            }
            const auto parts = split_path(path, lex);
            Table* node = &root;
            for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
                if (auto it = node->table_arrays.find(parts[i]); it != node->table_arrays.end()) {
                    if (it->second.empty()) lex.fail("dangling table array '" + parts[i] + "'");
                    node = &it->second.back();
                } else {
                    node = &node->tables[parts[i]];
                }
            }
            const std::string& leaf = parts.back();
            if (is_array) {
                node->table_arrays[leaf].emplace_back();
                node->table_arrays[leaf].back().line = hline;
                current = &node->table_arrays[leaf].back();
            } else {
                if (node->tables.count(leaf) || node->table_arrays.count(leaf))
                    lex.fail("duplicate table [" + path + "]");
                node->tables[leaf].line = hline;
                current = &node->tables[leaf];
            }
            lex.skip_ws(false);
            if (!lex.eof() && lex.peek() != '\n' && lex.peek() != '#')
                lex.fail("unexpected text after table header");
            continue;
        }
        // key = value
        const int kline = lex.line();
        const int kcol = lex.col();
        std::string key = parse_key(lex);
        lex.skip_ws(false);
        if (lex.eof() || lex.peek() != '=')
            parse_fail(source, kline, kcol, "expected '=' after key '" + key + "'");
        lex.advance();
        Value value = parse_value(lex);
        lex.skip_ws(false);
        if (!lex.eof() && lex.peek() != '\n' && lex.peek() != '#')
            lex.fail("unexpected text after value for key '" + key + "'");
        if (current->values.count(key))
            parse_fail(source, kline, kcol, "duplicate key '" + key + "'");
        value.line = kline;
        value.col = kcol;
        current->values.emplace(std::move(key), std::move(value));
    }
    return root;
}

// ---------------------------------------------------------------------------
// Binder: DOM -> Scenario, rejecting anything it does not recognize.
// ---------------------------------------------------------------------------

class Binder {
public:
    Binder(Table root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    Scenario bind() {
        Scenario sc;
        bind_graph(take_table("graph"), sc);
        bind_exosystem(take_table("exosystem"), sc);
        bind_subsystems(take_table_array("subsystem"), sc);
        bind_controller(take_table("controller"), sc);
        bind_observer(take_table("observer"), sc);
        bind_integrator(take_table("integrator"), sc);
        if (auto t = take_optional_table("uncertainty")) bind_uncertainty(std::move(*t), sc);
        if (auto t = take_optional_table("overrides")) bind_overrides(std::move(*t), sc);
        finish_root();
        sc.validate_shapes();
        return sc;
    }

private:
    Table root_;
    std::string source_;

    [[noreturn]] void fail(int line, int col, const std::string& what) const {
        parse_fail(source_, line, col, what);
    }

    Table take_table(const std::string& name) {
        auto it = root_.tables.find(name);
        if (it == root_.tables.end())
            parse_fail(source_, 1, 1, "missing required section [" + name + "]");
        Table t = std::move(it->second);
        root_.tables.erase(it);
        return t;
    }

    std::optional<Table> take_optional_table(const std::string& name) {
        auto it = root_.tables.find(name);
        if (it == root_.tables.end()) return std::nullopt;
        Table t = std::move(it->second);
        root_.tables.erase(it);
        return t;
    }

    std::vector<Table> take_table_array(const std::string& name) {
        auto it = root_.table_arrays.find(name);
        if (it == root_.table_arrays.end())
            parse_fail(source_, 1, 1, "missing required section [[" + name + "]]");
        std::vector<Table> t = std::move(it->second);
        root_.table_arrays.erase(it);
        return t;
    }

    void finish_root() {
        if (!root_.values.empty()) {
            const auto& [key, value] = *root_.values.begin();
            fail(value.line, value.col, "unknown top-level key '" + key + "'");
        }
        if (!root_.tables.empty())
            fail(root_.tables.begin()->second.line, 1,
                 "unknown section [" + root_.tables.begin()->first + "]");
        if (!root_.table_arrays.empty())
            fail(root_.table_arrays.begin()->second.front().line, 1,
                 "unknown section [[" + root_.table_arrays.begin()->first + "]]");
    }

    void finish_table(const Table& t, const std::string& where) {
        if (!t.values.empty()) {
            const auto& [key, value] = *t.values.begin();
            fail(value.line, value.col, "unknown key '" + key + "' in " + where);
        }
        if (!t.tables.empty())
            fail(t.tables.begin()->second.line, 1,
                 "unknown subsection in " + where + ": [" + t.tables.begin()->first + "]");
        if (!t.table_arrays.empty())
            fail(t.table_arrays.begin()->second.front().line, 1,
                 "unknown subsection in " + where + ": [[" + t.table_arrays.begin()->first + "]]");
    }

    static std::optional<Value> take(Table& t, const std::string& key) {
        auto it = t.values.find(key);
        if (it == t.values.end()) return std::nullopt;
        Value v = std::move(it->second);
        t.values.erase(it);
        return v;
    }

    Value require(Table& t, const std::string& key, const std::string& where) {
        auto v = take(t, key);
        if (!v) fail(t.line, 1, "missing key '" + key + "' in " + where);
        return std::move(*v);
    }

    double as_double(const Value& v) {
        if (v.kind == Value::Kind::real || v.kind == Value::Kind::integer) return v.real_v;
        fail(v.line, v.col, "expected a number");
    }

    std::int64_t as_int(const Value& v) {
        if (v.kind != Value::Kind::integer) fail(v.line, v.col, "expected an integer");
        return v.int_v;
    }

    std::uint64_t as_u64(const Value& v) {
        if (v.kind != Value::Kind::integer || !v.has_uint)
            fail(v.line, v.col, "expected a non-negative integer");
        return v.uint_v;
    }

    std::string as_string(const Value& v) {
        if (v.kind != Value::Kind::string) fail(v.line, v.col, "expected a string");
        return v.str_v;
    }

    Eigen::VectorXd as_vector(const Value& v) {
        if (v.kind != Value::Kind::array) fail(v.line, v.col, "expected an array of numbers");
        Eigen::VectorXd out(static_cast<Eigen::Index>(v.array_v.size()));
        for (std::size_t i = 0; i < v.array_v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as_double(v.array_v[i]);
        return out;
    }

    Eigen::MatrixXd as_matrix(const Value& v) {
        if (v.kind != Value::Kind::array) fail(v.line, v.col, "expected an array of row arrays");
        const std::size_t rows = v.array_v.size();
        if (rows == 0) return Eigen::MatrixXd(0, 0);
        if (v.array_v[0].kind != Value::Kind::array)
            fail(v.line, v.col, "expected an array of row arrays");
        const std::size_t cols = v.array_v[0].array_v.size();
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows; ++i) {
            const Value& row = v.array_v[i];
            if (row.kind != Value::Kind::array || row.array_v.size() != cols)
                fail(row.line, row.col, "matrix rows must all have the same length");
            for (std::size_t j = 0; j < cols; ++j)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    as_double(row.array_v[j]);
        }
        return out;
    }

    void bind_graph(Table t, Scenario& sc) {
        const int n = static_cast<int>(as_int(require(t, "n_followers", "[graph]")));
        const int m = static_cast<int>(as_int(require(t, "n_informed", "[graph]")));
        std::vector<graph::Edge> edges;
        const Value ev = require(t, "edges", "[graph]");
        if (ev.kind != Value::Kind::array) fail(ev.line, ev.col, "edges must be an array");
        for (const Value& item : ev.array_v) {
            if (item.kind != Value::Kind::array || item.array_v.size() != 3)
                fail(item.line, item.col, "each edge must be [from, to, weight]");
            graph::Edge e;
            e.from = static_cast<int>(as_int(item.array_v[0]));
            e.to = static_cast<int>(as_int(item.array_v[1]));
            e.weight = as_double(item.array_v[2]);
            edges.push_back(e);
        }
        finish_table(t, "[graph]");
        sc.graph = graph::DirectedGraph::build(n, m, edges);
    }

    void bind_exosystem(Table t, Scenario& sc) {
        sc.exosystem.s = as_matrix(require(t, "s", "[exosystem]"));
        sc.exosystem.f = as_matrix(require(t, "f", "[exosystem]"));
        sc.exosystem.v0 = as_vector(require(t, "v0", "[exosystem]"));
        finish_table(t, "[exosystem]");
    }

    void bind_subsystems(std::vector<Table> blocks, Scenario& sc) {
        for (Table& t : blocks) {
            LtiSubsystem sub;
            sub.a_nom = as_matrix(require(t, "a", "[[subsystem]]"));
            sub.b_nom = as_matrix(require(t, "b", "[[subsystem]]"));
            sub.c_nom = as_matrix(require(t, "c", "[[subsystem]]"));
            sub.d_nom = as_matrix(require(t, "d", "[[subsystem]]"));
            sub.e_nom = as_matrix(require(t, "e", "[[subsystem]]"));
            if (auto v = take(t, "delta_a")) sub.delta_a = as_matrix(*v);
            if (auto v = take(t, "delta_b")) sub.delta_b = as_matrix(*v);
            if (auto v = take(t, "delta_c")) sub.delta_c = as_matrix(*v);
            if (auto v = take(t, "delta_d")) sub.delta_d = as_matrix(*v);
            if (auto v = take(t, "delta_e")) sub.delta_e = as_matrix(*v);

            InitialState init;
            if (auto v = take(t, "x0")) init.x0 = as_vector(*v);
            if (auto v = take(t, "xi0")) init.xi0 = as_vector(*v);
            if (auto v = take(t, "z0")) init.z0 = as_vector(*v);
            if (auto v = take(t, "d0")) init.d0 = as_double(*v);
            if (auto v = take(t, "c0")) init.c0 = as_double(*v);
            double tau = 1.0;
            if (auto v = take(t, "tau")) tau = as_double(*v);
            finish_table(t, "[[subsystem]]");

            sc.subsystems.push_back(std::move(sub));
            sc.initial_states.push_back(std::move(init));
            sc.tau.push_back(tau);
        }
    }

    void bind_controller(Table t, Scenario& sc) {
        sc.controller = controller_kind_from(as_string(require(t, "kind", "[controller]")));
        finish_table(t, "[controller]");
    }

    void bind_observer(Table t, Scenario& sc) {
        sc.observer = observer_kind_from(as_string(require(t, "kind", "[observer]")));
        finish_table(t, "[observer]");
    }

    void bind_integrator(Table t, Scenario& sc) {
        sc.integrator.dt = as_double(require(t, "dt", "[integrator]"));
        sc.integrator.t_final = as_double(require(t, "t_final", "[integrator]"));
        if (auto v = take(t, "record_every"))
            sc.integrator.record_every = static_cast<int>(as_int(*v));
        if (auto v = take(t, "method")) sc.integrator.method = as_string(*v);
        finish_table(t, "[integrator]");
    }

    void bind_uncertainty(Table t, Scenario& sc) {
        if (auto v = take(t, "seed")) sc.uncertainty.seed = as_u64(*v);
        auto entries = t.table_arrays.find("entry");
        if (entries != t.table_arrays.end()) {
            for (Table& et : entries->second) {
                UncertaintyEntry entry;
                entry.matrix = as_string(require(et, "matrix", "[[uncertainty.entry]]"));
                entry.row = static_cast<int>(as_int(require(et, "row", "[[uncertainty.entry]]")));
                entry.col = static_cast<int>(as_int(require(et, "col", "[[uncertainty.entry]]")));
                entry.lo = as_double(require(et, "lo", "[[uncertainty.entry]]"));
                entry.hi = as_double(require(et, "hi", "[[uncertainty.entry]]"));
                if (auto v = take(et, "bounds")) {
                    const std::string b = as_string(*v);
                    if (b == "half_open_low") entry.half_open_low = true;
                    else if (b == "closed") entry.half_open_low = false;
                    else fail(v->line, v->col, "bounds must be 'closed' or 'half_open_low'");
                }
                finish_table(et, "[[uncertainty.entry]]");
                sc.uncertainty.entries.push_back(std::move(entry));
            }
            t.table_arrays.erase(entries);
        }
        finish_table(t, "[uncertainty]");
    }

    void bind_overrides(Table t, Scenario& sc) {
        if (auto v = take(t, "l")) sc.overrides.l = as_matrix(*v);
        auto agents = t.table_arrays.find("agent");
        if (agents != t.table_arrays.end()) {
            for (Table& at : agents->second) {
                AgentOverride ov;
                if (auto v = take(at, "agent")) ov.agent = static_cast<int>(as_int(*v));
                if (auto v = take(at, "k1")) ov.k1 = as_matrix(*v);
                if (auto v = take(at, "k2")) ov.k2 = as_matrix(*v);
                if (auto v = take(at, "kx")) ov.kx = as_matrix(*v);
                if (auto v = take(at, "kz")) ov.kz = as_matrix(*v);
                if (auto v = take(at, "li")) ov.li = as_matrix(*v);
                finish_table(at, "[[overrides.agent]]");
                sc.overrides.agents.push_back(std::move(ov));
            }
            t.table_arrays.erase(agents);
        }
        finish_table(t, "[overrides]");
    }
};

// ---------------------------------------------------------------------------
// Canonical serializer
// ---------------------------------------------------------------------------

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void emit_vector(std::ostream& os, const Eigen::VectorXd& v) {
    os << "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << fmt_double(v(i));
    }
    os << "]";
}

void emit_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    os << "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) os << ", ";
        os << "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) os << ", ";
            os << fmt_double(m(i, j));
        }
        os << "]";
    }
    os << "]";
}

bool nonzero(const Eigen::MatrixXd& m) { return m.size() > 0 && m.cwiseAbs().maxCoeff() != 0.0; }

} // namespace

Scenario parse_scenario_text(const std::string& text, const std::string& source_name) {
    Table root = parse_document(text, source_name);
    Binder binder(std::move(root), source_name);
    return binder.bind();
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io_error, "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) raise(Errc::io_error, "failed reading scenario file '" + path + "'");
    return parse_scenario_text(buf.str(), path);
}

std::string serialize_scenario(const Scenario& sc) {
    std::ostringstream os;
    os << "[graph]\n";
    os << "n_followers = " << sc.graph.n_followers() << "\n";
    os << "n_informed = " << sc.graph.n_informed() << "\n";
    os << "edges = [";
    bool first = true;
    const Eigen::MatrixXd& adj = sc.graph.adjacency();
    for (int from = 1; from <= sc.graph.n_followers(); ++from) {
        for (int to = 1; to <= sc.graph.n_followers(); ++to) {
            const double w = adj(to - 1, from - 1);
            if (w != 0.0) {
                if (!first) os << ", ";
                first = false;
                os << "[" << from << ", " << to << ", " << fmt_double(w) << "]";
            }
        }
    }
    os << "]\n\n";

    os << "[exosystem]\n";
    os << "s = ";
    emit_matrix(os, sc.exosystem.s);
    os << "\nf = ";
    emit_matrix(os, sc.exosystem.f);
    os << "\nv0 = ";
    emit_vector(os, sc.exosystem.v0);
    os << "\n";

    for (std::size_t i = 0; i < sc.subsystems.size(); ++i) {
        const LtiSubsystem& sub = sc.subsystems[i];
        os << "\n[[subsystem]]\n";
        os << "a = ";
        emit_matrix(os, sub.a_nom);
        os << "\nb = ";
        emit_matrix(os, sub.b_nom);
        os << "\nc = ";
        emit_matrix(os, sub.c_nom);
        os << "\nd = ";
        emit_matrix(os, sub.d_nom);
        os << "\ne = ";
        emit_matrix(os, sub.e_nom);
        os << "\n";
        if (nonzero(sub.delta_a)) { os << "delta_a = "; emit_matrix(os, sub.delta_a); os << "\n"; }
        if (nonzero(sub.delta_b)) { os << "delta_b = "; emit_matrix(os, sub.delta_b); os << "\n"; }
        if (nonzero(sub.delta_c)) { os << "delta_c = "; emit_matrix(os, sub.delta_c); os << "\n"; }
        if (nonzero(sub.delta_d)) { os << "delta_d = "; emit_matrix(os, sub.delta_d); os << "\n"; }
        if (nonzero(sub.delta_e)) { os << "delta_e = "; emit_matrix(os, sub.delta_e); os << "\n"; }
        if (i < sc.initial_states.size()) {
            const InitialState& init = sc.initial_states[i];
            if (init.x0) { os << "x0 = "; emit_vector(os, *init.x0); os << "\n"; }
            if (init.xi0) { os << "xi0 = "; emit_vector(os, *init.xi0); os << "\n"; }
            if (init.z0) { os << "z0 = "; emit_vector(os, *init.z0); os << "\n"; }
            if (init.d0) os << "d0 = " << fmt_double(*init.d0) << "\n";
            if (init.c0) os << "c0 = " << fmt_double(*init.c0) << "\n";
        }
        if (i < sc.tau.size() && sc.tau[i] != 1.0)
            os << "tau = " << fmt_double(sc.tau[i]) << "\n";
    }

    os << "\n[controller]\nkind = \"" << controller_kind_name(sc.controller) << "\"\n";
    os << "\n[observer]\nkind = \"" << observer_kind_name(sc.observer) << "\"\n";

    os << "\n[integrator]\n";
    os << "dt = " << fmt_double(sc.integrator.dt) << "\n";
    os << "t_final = " << fmt_double(sc.integrator.t_final) << "\n";
    os << "record_every = " << sc.integrator.record_every << "\n";
    os << "method = \"" << sc.integrator.method << "\"\n";

    os << "\n[uncertainty]\n";
    os << "seed = " << sc.uncertainty.seed << "\n";
    for (const UncertaintyEntry& e : sc.uncertainty.entries) {
        os << "\n[[uncertainty.entry]]\n";
        os << "matrix = \"" << e.matrix << "\"\n";
        os << "row = " << e.row << "\n";
        os << "col = " << e.col << "\n";
        os << "lo = " << fmt_double(e.lo) << "\n";
        os << "hi = " << fmt_double(e.hi) << "\n";
        os << "bounds = \"" << (e.half_open_low ? "half_open_low" : "closed") << "\"\n";
    }

    const bool has_overrides = sc.overrides.l.has_value() || !sc.overrides.agents.empty();
    if (has_overrides) {
        os << "\n[overrides]\n";
        if (sc.overrides.l) {
            os << "l = ";
            emit_matrix(os, *sc.overrides.l);
            os << "\n";
        }
        for (const AgentOverride& ov : sc.overrides.agents) {
            os << "\n[[overrides.agent]]\n";
            os << "agent = " << ov.agent << "\n";
            if (ov.k1) { os << "k1 = "; emit_matrix(os, *ov.k1); os << "\n"; }
            if (ov.k2) { os << "k2 = "; emit_matrix(os, *ov.k2); os << "\n"; }
            if (ov.kx) { os << "kx = "; emit_matrix(os, *ov.kx); os << "\n"; }
            if (ov.kz) { os << "kz = "; emit_matrix(os, *ov.kz); os << "\n"; }
            if (ov.li) { os << "li = "; emit_matrix(os, *ov.li); os << "\n"; }
        }
    }
    return os.str();
}

std::string scenario_hash_hex(const Scenario& scenario) {
    const std::string text = serialize_scenario(scenario);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "0x%016" PRIx64, hash);
    return buf;
}

} // namespace coopreg::scenario_io
