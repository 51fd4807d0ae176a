#include "poml/template.hpp"

#include <cmath>
#include <cstdlib>
#include <memory>

namespace poml {

Scope::Scope()
{
    frames_.emplace_back();
}

Scope::Scope(const Value& globals) : Scope()
{
    if (globals.is_object())
        for (const auto& [k, v] : globals.items())
            set(k, normalize_numbers(v));
}

void Scope::push()
{
    frames_.emplace_back();
}

void Scope::pop()
{
    if (frames_.size() > 1)
        frames_.pop_back();
}

void Scope::set(std::string name, Value value)
{
    auto& frame = frames_.back();
    for (auto& [n, v] : frame) {
        if (n == name) {
            v = std::move(value);
            return;
        }
    }
    frame.emplace_back(std::move(name), std::move(value));
}

const Value* Scope::lookup(std::string_view name) const
{
    for (auto f = frames_.rbegin(); f != frames_.rend(); ++f)
        for (auto b = f->rbegin(); b != f->rend(); ++b)
            if (b->first == name)
                return &b->second;
    return nullptr;
}

namespace {

enum class Tok { end, number, string, ident, punct };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    double number = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (pos_ >= src_.size())
            return {};
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)))
            return lex_number();
        if (c == '"' || c == '\'')
            return lex_string(c);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::size_t start = pos_;
            while (pos_ < src_.size()
                   && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' || src_[pos_] == '$'))
                ++pos_;
            return {Tok::ident, std::string(src_.substr(start, pos_ - start)), 0};
        }
        static constexpr std::string_view two[] = {"==", "!=", "<=", ">=", "&&", "||"};
        for (auto op : two) {
            if (src_.substr(pos_, 2) == op) {
                pos_ += 2;
                return {Tok::punct, std::string(op), 0};
            }
        }
        static constexpr std::string_view one = "()[]{},:.?!-+*/%<>";
        if (one.find(c) != std::string_view::npos) {
            ++pos_;
            return {Tok::punct, std::string(1, c), 0};
        }
        throw ExpressionError("parse-error", std::string("unexpected character '") + c + "'");
    }

private:
    Token lex_number()
    {
        std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        };
        digits();
        if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
            ++pos_;
            digits();
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-'))
                ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                digits();
            else
                pos_ = save;
        }
        std::string text(src_.substr(start, pos_ - start));
        return {Tok::number, text, std::strtod(text.c_str(), nullptr)};
    }

    Token lex_string(char quote)
    {
        ++pos_;
        std::string out;
        while (pos_ < src_.size() && src_[pos_] != quote) {
            char c = src_[pos_++];
            if (c != '\\') {
                out += c;
                continue;
            }
            if (pos_ >= src_.size())
                break;
            char e = src_[pos_++];
            switch (e) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            default: out += e; break;
            }
        }
        if (pos_ >= src_.size())
            throw ExpressionError("parse-error", "unterminated string literal");
        ++pos_;
        return {Tok::string, std::move(out), 0};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

enum class Op {
    literal, ident, array, object, member, index, logical_not, negate,
    add, sub, mul, div, mod, eq, ne, lt, le, gt, ge, logical_and, logical_or, conditional
};

struct Expr {
    Op op = Op::literal;
    Value literal;
    std::string name;
    std::vector<std::unique_ptr<Expr>> args;
    std::vector<std::string> keys;
};

using ExprPtr = std::unique_ptr<Expr>;

// Bounds tree size, and with it evaluation recursion, for hostile input.
constexpr std::size_t max_nodes = 2000;
thread_local std::size_t nodes_built = 0;

ExprPtr node(Op op, std::vector<ExprPtr> args = {})
{
    if (++nodes_built > max_nodes)
        throw ExpressionError("parse-error", "expression too large");
    auto e = std::make_unique<Expr>();
    e->op = op;
    e->args = std::move(args);
    return e;
}

ExprPtr binary(Op op, ExprPtr l, ExprPtr r)
{
    std::vector<ExprPtr> args;
    args.push_back(std::move(l));
    args.push_back(std::move(r));
    return node(op, std::move(args));
}

class ExprParser {
public:
    explicit ExprParser(std::string_view src) : lex_(src) { advance(); }

    ExprPtr parse_all()
    {
        ExprPtr e = conditional();
        if (cur_.kind != Tok::end)
            throw ExpressionError("parse-error", "unexpected '" + cur_.text + "'");
        return e;
    }

private:
    static constexpr int max_nesting = 128;

    void advance() { cur_ = lex_.next(); }
    bool is(std::string_view p) const { return cur_.kind == Tok::punct && cur_.text == p; }

    void expect(std::string_view p)
    {
        if (!is(p))
            throw ExpressionError("parse-error", "expected '" + std::string(p) + "'"
                                                     + (cur_.kind == Tok::end ? " at end of expression" : " before '" + cur_.text + "'"));
        advance();
    }

    struct Nest {
        explicit Nest(int& d) : d_(d)
        {
            if (++d_ > max_nesting)
                throw ExpressionError("parse-error", "expression nested too deeply");
        }
        ~Nest() { --d_; }
        int& d_;
    };

    ExprPtr conditional()
    {
        Nest guard(depth_);
        ExprPtr cond = logical_or();
        if (!is("?"))
            return cond;
        advance();
        ExprPtr a = conditional();
        expect(":");
        ExprPtr b = conditional();
        std::vector<ExprPtr> args;
        args.push_back(std::move(cond));
        args.push_back(std::move(a));
        args.push_back(std::move(b));
        return node(Op::conditional, std::move(args));
    }

    ExprPtr logical_or()
    {
        ExprPtr l = logical_and();
        while (is("||")) {
            advance();
            l = binary(Op::logical_or, std::move(l), logical_and());
        }
        return l;
    }

    ExprPtr logical_and()
    {
        ExprPtr l = equality();
        while (is("&&")) {
            advance();
            l = binary(Op::logical_and, std::move(l), equality());
        }
        return l;
    }

    ExprPtr equality()
    {
        ExprPtr l = comparison();
        while (is("==") || is("!=")) {
            Op op = is("==") ? Op::eq : Op::ne;
            advance();
            l = binary(op, std::move(l), comparison());
        }
        return l;
    }

    ExprPtr comparison()
    {
        ExprPtr l = additive();
        while (is("<") || is("<=") || is(">") || is(">=")) {
            Op op = is("<") ? Op::lt : is("<=") ? Op::le : is(">") ? Op::gt : Op::ge;
            advance();
            l = binary(op, std::move(l), additive());
        }
        return l;
    }

    ExprPtr additive()
    {
        ExprPtr l = multiplicative();
        while (is("+") || is("-")) {
            Op op = is("+") ? Op::add : Op::sub;
            advance();
            l = binary(op, std::move(l), multiplicative());
        }
        return l;
    }

    ExprPtr multiplicative()
    {
        ExprPtr l = unary();
        while (is("*") || is("/") || is("%")) {
            Op op = is("*") ? Op::mul : is("/") ? Op::div : Op::mod;
            advance();
            l = binary(op, std::move(l), unary());
        }
        return l;
    }

    ExprPtr unary()
    {
        if (is("!") || is("-")) {
            Nest guard(depth_);
            Op op = is("!") ? Op::logical_not : Op::negate;
            advance();
            std::vector<ExprPtr> args;
            args.push_back(unary());
            return node(op, std::move(args));
        }
        return postfix();
    }

    ExprPtr postfix()
    {
        ExprPtr e = primary();
        for (;;) {
            if (is(".")) {
                advance();
                if (cur_.kind != Tok::ident)
                    throw ExpressionError("parse-error", "expected a member name after '.'");
                std::vector<ExprPtr> args;
                args.push_back(std::move(e));
                e = node(Op::member, std::move(args));
                e->name = cur_.text;
                advance();
            } else if (is("[")) {
                advance();
                ExprPtr idx = conditional();
                expect("]");
                e = binary(Op::index, std::move(e), std::move(idx));
            } else {
                return e;
            }
        }
    }

    ExprPtr primary()
    {
        if (cur_.kind == Tok::number) {
            auto e = node(Op::literal);
            e->literal = cur_.number;
            advance();
            return e;
        }
        if (cur_.kind == Tok::string) {
            auto e = node(Op::literal);
            e->literal = cur_.text;
            advance();
            return e;
        }
        if (cur_.kind == Tok::ident) {
            auto e = node(Op::literal);
            if (cur_.text == "true")
                e->literal = true;
            else if (cur_.text == "false")
                e->literal = false;
            else if (cur_.text == "null")
                e->literal = nullptr;
            else {
                e->op = Op::ident;
                e->name = cur_.text;
            }
            advance();
            return e;
        }
        if (is("(")) {
            advance();
            ExprPtr e = conditional();
            expect(")");
            return e;
        }
        if (is("[")) {
            Nest guard(depth_);
            advance();
            auto e = node(Op::array);
            while (!is("]")) {
                e->args.push_back(conditional());
                if (!is(","))
                    break;
                advance();
            }
            expect("]");
            return e;
        }
        if (is("{")) {
            Nest guard(depth_);
            advance();
            auto e = node(Op::object);
            while (!is("}")) {
                if (cur_.kind != Tok::ident && cur_.kind != Tok::string)
                    throw ExpressionError("parse-error", "expected an object key");
                e->keys.push_back(cur_.text);
                advance();
                expect(":");
                e->args.push_back(conditional());
                if (!is(","))
                    break;
                advance();
            }
            expect("}");
            return e;
        }
        if (cur_.kind == Tok::end)
            throw ExpressionError("parse-error", "unexpected end of expression");
        throw ExpressionError("parse-error", "unexpected '" + cur_.text + "'");
    }

    Lexer lex_;
    Token cur_;
    int depth_ = 0;
};

bool is_number(const Value& v)
{
    return v.is_number();
}

bool values_equal(const Value& a, const Value& b)
{
    if (is_number(a) && is_number(b))
        return a.get<double>() == b.get<double>();
    if (a.type() != b.type())
        return false;
    if (a.is_array()) {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!values_equal(a[i], b[i]))
                return false;
        return true;
    }
    if (a.is_object()) {
        if (a.size() != b.size())
            return false;
        for (const auto& [k, v] : a.items()) {
            auto it = b.find(k);
            if (it == b.end() || !values_equal(v, *it))
                return false;
        }
        return true;
    }
    return a == b;
}

[[noreturn]] void type_error(std::string_view op, const Value& a, const Value* b = nullptr)
{
    std::string msg = "operator '" + std::string(op) + "' cannot be applied to " + type_name(a);
    if (b)
        msg += " and " + type_name(*b);
    throw ExpressionError("type-error", msg);
}

Value evaluate(const Expr& e, const Scope& scope)
{
    auto arg = [&](std::size_t i) { return evaluate(*e.args[i], scope); };
    switch (e.op) {
    case Op::literal:
        return e.literal;
    case Op::ident: {
        const Value* v = scope.lookup(e.name);
        if (!v)
            throw ExpressionError("unknown-identifier", "'" + e.name + "' is not defined");
        return *v;
    }
    case Op::array: {
        Value out = Value::array();
        for (const auto& a : e.args)
            out.push_back(evaluate(*a, scope));
        return out;
    }
    case Op::object: {
        Value out = Value::object();
        for (std::size_t i = 0; i < e.args.size(); ++i)
            out[e.keys[i]] = evaluate(*e.args[i], scope);
        return out;
    }
    case Op::member: {
        Value obj = arg(0);
        if (obj.is_object()) {
            auto it = obj.find(e.name);
            return it == obj.end() ? Value() : *it;
        }
        if (e.name == "length" && obj.is_array())
            return Value(static_cast<double>(obj.size()));
        if (e.name == "length" && obj.is_string())
            return Value(static_cast<double>(obj.get_ref<const std::string&>().size()));
        throw ExpressionError("type-error", "cannot read member '" + e.name + "' of " + type_name(obj));
    }
    case Op::index: {
        Value obj = arg(0);
        Value idx = arg(1);
        if (obj.is_array() && idx.is_number()) {
            double d = idx.get<double>();
            if (d < 0 || d != std::floor(d) || d >= static_cast<double>(obj.size()))
                return Value();
            return obj[static_cast<std::size_t>(d)];
        }
        if (obj.is_object() && idx.is_string()) {
            auto it = obj.find(idx.get<std::string>());
            return it == obj.end() ? Value() : *it;
        }
        type_error("[]", obj, &idx);
    }
    case Op::logical_not:
        return Value(!truthy(arg(0)));
    case Op::negate: {
        Value v = arg(0);
        if (!v.is_number())
            type_error("-", v);
        return Value(-v.get<double>());
    }
    case Op::logical_and: {
        Value l = arg(0);
        return truthy(l) ? arg(1) : l;
    }
    case Op::logical_or: {
        Value l = arg(0);
        return truthy(l) ? l : arg(1);
    }
    case Op::conditional:
        return truthy(arg(0)) ? arg(1) : arg(2);
    case Op::eq:
    case Op::ne: {
        Value l = arg(0);
        Value r = arg(1);
        return Value(values_equal(l, r) == (e.op == Op::eq));
    }
    default:
        break;
    }

    Value l = arg(0);
    Value r = arg(1);
    switch (e.op) {
    case Op::add:
        if (l.is_string() || r.is_string())
            return Value(display_string(l) + display_string(r));
        if (l.is_number() && r.is_number())
            return Value(l.get<double>() + r.get<double>());
        type_error("+", l, &r);
    case Op::sub:
    case Op::mul:
    case Op::div:
    case Op::mod: {
        static constexpr const char* names[] = {"-", "*", "/", "%"};
        const char* name = names[static_cast<int>(e.op) - static_cast<int>(Op::sub)];
        if (!l.is_number() || !r.is_number())
            type_error(name, l, &r);
        double a = l.get<double>(), b = r.get<double>();
        if (e.op == Op::sub)
            return Value(a - b);
        if (e.op == Op::mul)
            return Value(a * b);
        if (e.op == Op::div)
            return Value(a / b);
        return Value(std::fmod(a, b));
    }
    case Op::lt:
    case Op::le:
    case Op::gt:
    case Op::ge: {
        static constexpr const char* names[] = {"<", "<=", ">", ">="};
        const char* name = names[static_cast<int>(e.op) - static_cast<int>(Op::lt)];
        int cmp;
        if (l.is_number() && r.is_number()) {
            double a = l.get<double>(), b = r.get<double>();
            if (std::isnan(a) || std::isnan(b))
                return Value(false);
            cmp = a < b ? -1 : a > b ? 1 : 0;
        } else if (l.is_string() && r.is_string()) {
            cmp = l.get_ref<const std::string&>().compare(r.get_ref<const std::string&>());
            cmp = cmp < 0 ? -1 : cmp > 0 ? 1 : 0;
        } else {
            type_error(name, l, &r);
        }
        switch (e.op) {
        case Op::lt: return Value(cmp < 0);
        case Op::le: return Value(cmp <= 0);
        case Op::gt: return Value(cmp > 0);
        default: return Value(cmp >= 0);
        }
    }
    default:
        throw ExpressionError("parse-error", "unsupported operator");
    }
}

} // namespace

Value eval_expression(std::string_view expr, const Scope& scope)
{
    if (expr.find_first_not_of(" \t\r\n") == std::string_view::npos)
        throw ExpressionError("parse-error", "empty expression");
    nodes_built = 0;
    ExprPtr tree = ExprParser(expr).parse_all();
    return evaluate(*tree, scope);
}

} // namespace poml
