#include <algorithm>
#include <charconv>
#include <climits>
#include <tuple>

#include "socialsim/dsl.hpp"

namespace socialsim::dsl {

namespace {

enum class Tok {
    Ident,
    Int,
    String,
    BoundRef,  // @name
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Pipe,
    Arrow,
    Assign,
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
    PlusEq,
    MinusEq,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int value = 0;
    int line = 1;
    int column = 1;
};

std::string_view describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::String: return "string";
        case Tok::BoundRef: return "bound reference";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Comma: return "','";
        case Tok::Pipe: return "'|'";
        case Tok::Arrow: return "'->'";
        case Tok::Assign: return "'='";
        case Tok::Eq: return "'=='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::PlusEq: return "'+='";
        case Tok::MinusEq: return "'-='";
        case Tok::End: return "end of input";
    }
    return "token";
}

bool is_ident_start(unsigned char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_ident_char(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    Lexer(std::string_view src, std::vector<Diagnostic>& diags) : src_(src), diags_(diags) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            if (pos_ >= src_.size()) break;
            Token t;
            t.line = line_;
            t.column = col_;
            unsigned char c = static_cast<unsigned char>(src_[pos_]);
            if (is_ident_start(c)) {
                std::size_t start = pos_;
                while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) advance();
                t.kind = Tok::Ident;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (is_digit(c) || (c == '-' && is_digit(peek(1)))) {
                lex_int(t);
            } else if (c == '"') {
                if (!lex_string(t)) continue;
            } else if (c == '@' && is_ident_start(peek(1))) {
                advance();
                std::size_t start = pos_;
                while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) advance();
                t.kind = Tok::BoundRef;
                t.text = std::string(src_.substr(start, pos_ - start));
            } else if (!lex_punct(t)) {
                diags_.push_back({Severity::Error, line_, col_, "unexpected-character",
                                  "unexpected character " + printable(c)});
                advance();
                continue;
            }
            out.push_back(std::move(t));
        }
        Token end;
        end.kind = Tok::End;
        end.line = line_;
        end.column = col_;
        out.push_back(end);
        return out;
    }

private:
    static std::string printable(unsigned char c) {
        if (c >= 0x20 && c < 0x7f) return std::string("'") + static_cast<char>(c) + "'";
        static const char* hex = "0123456789abcdef";
        return std::string("0x") + hex[c >> 4] + hex[c & 15];
    }

    unsigned char peek(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? static_cast<unsigned char>(src_[pos_ + ahead]) : 0;
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    void lex_int(Token& t) {
        std::size_t start = pos_;
        if (src_[pos_] == '-') advance();
        while (pos_ < src_.size() && is_digit(static_cast<unsigned char>(src_[pos_]))) advance();
        t.kind = Tok::Int;
        t.text = std::string(src_.substr(start, pos_ - start));
        long long v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || v < INT_MIN / 2 || v > INT_MAX / 2) {
            diags_.push_back({Severity::Error, t.line, t.column, "int-out-of-range",
                              "integer literal " + t.text + " is out of range"});
            v = 0;
        }
        t.value = static_cast<int>(v);
    }

    bool lex_string(Token& t) {
        advance();  // opening quote
        std::string value;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n') {
                diags_.push_back({Severity::Error, t.line, t.column, "unterminated-string",
                                  "string literal is not terminated on its line"});
                return false;
            }
            char c = src_[pos_];
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\' && pos_ + 1 < src_.size()) {
                char e = src_[pos_ + 1];
                advance();
                advance();
                switch (e) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    default: value += '\\'; value += e; break;
                }
                continue;
            }
            value += c;
            advance();
        }
        t.kind = Tok::String;
        t.text = std::move(value);
        return true;
    }

    bool lex_punct(Token& t) {
        char c = src_[pos_];
        unsigned char n = peek(1);
        auto take = [&](Tok kind, int len) {
            t.kind = kind;
            t.text = std::string(src_.substr(pos_, static_cast<std::size_t>(len)));
            for (int i = 0; i < len; ++i) advance();
            return true;
        };
        switch (c) {
            case '{': return take(Tok::LBrace, 1);
            case '}': return take(Tok::RBrace, 1);
            case '(': return take(Tok::LParen, 1);
            case ')': return take(Tok::RParen, 1);
            case ',': return take(Tok::Comma, 1);
            case '|': return take(Tok::Pipe, 1);
            case '-':
                if (n == '>') return take(Tok::Arrow, 2);
                if (n == '=') return take(Tok::MinusEq, 2);
                return false;
            case '+':
                if (n == '=') return take(Tok::PlusEq, 2);
                return false;
            case '=': return n == '=' ? take(Tok::Eq, 2) : take(Tok::Assign, 1);
            case '<': return n == '=' ? take(Tok::Le, 2) : take(Tok::Lt, 1);
            case '>': return n == '=' ? take(Tok::Ge, 2) : take(Tok::Gt, 1);
            default: return false;
        }
    }

    std::string_view src_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct SyntaxError {};

constexpr int kMaxNesting = 64;

class Parser {
public:
    Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

    ScenarioDoc run() {
        ScenarioDoc doc;
        bool named = false;
        while (peek().kind != Tok::End) {
            braces_ = 0;
            try {
                parse_decl(doc, named);
            } catch (const SyntaxError&) {
                recover();
            }
        }
        return doc;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    const Token& next() {
        const Token& t = peek();
        if (t.kind == Tok::LBrace) ++braces_;
        if (t.kind == Tok::RBrace) --braces_;
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }

    static SourcePos pos_of(const Token& t) { return {t.line, t.column}; }

    [[noreturn]] void fail(const Token& at, std::string code, std::string message) {
        diags_.push_back({Severity::Error, at.line, at.column, std::move(code), std::move(message)});
        throw SyntaxError{};
    }

    [[noreturn]] void expected(std::string_view what) {
        const Token& t = peek();
        std::string found = t.kind == Tok::Ident ? "'" + t.text + "'" : std::string(describe(t.kind));
        fail(t, "unexpected-token", "expected " + std::string(what) + ", found " + found);
    }

    const Token& expect(Tok kind) {
        if (peek().kind != kind) expected(describe(kind));
        return next();
    }

    bool at_keyword(std::string_view kw) const { return peek().kind == Tok::Ident && peek().text == kw; }

    bool accept_keyword(std::string_view kw) {
        if (!at_keyword(kw)) return false;
        next();
        return true;
    }

    void expect_keyword(std::string_view kw) {
        if (!accept_keyword(kw)) expected("'" + std::string(kw) + "'");
    }

    std::string ident(std::string_view what) {
        if (peek().kind != Tok::Ident) expected(what);
        return next().text;
    }

    int integer() {
        if (peek().kind != Tok::Int) expected("integer");
        return next().value;
    }

    std::string string_lit() {
        if (peek().kind != Tok::String) expected("string");
        return next().text;
    }

    Role role() {
        if (peek().kind == Tok::Ident)
            if (auto r = role_from_string(peek().text)) {
                next();
                return *r;
            }
        expected("role (initiator, target or subject)");
    }

    Outcome outcome(bool allow_error) {
        if (peek().kind == Tok::Ident)
            if (auto o = outcome_from_string(peek().text); o && (allow_error || *o != Outcome::Error)) {
                next();
                return *o;
            }
        expected(allow_error ? "outcome (accept, neutral, reject or error)" : "outcome (accept, neutral or reject)");
    }

    CmpOp cmp_op() {
        switch (peek().kind) {
            case Tok::Lt: next(); return CmpOp::Lt;
            case Tok::Le: next(); return CmpOp::Le;
            case Tok::Eq: next(); return CmpOp::Eq;
            case Tok::Ge: next(); return CmpOp::Ge;
            case Tok::Gt: next(); return CmpOp::Gt;
            default: expected("comparison operator");
        }
    }

    void duplicate_attribute(const Token& at, std::string_view attr) {
        diags_.push_back({Severity::Error, at.line, at.column, "duplicate-attribute",
                          "attribute '" + std::string(attr) + "' given more than once"});
    }

    void recover() {
        // Skip to the next top-level declaration keyword.
        static constexpr std::string_view kTop[] = {"scenario", "network",  "trait",    "status",  "relationship",
                                                    "location", "character", "goals",   "exchange", "trigger"};
        if (peek().kind != Tok::End) next();
        while (peek().kind != Tok::End) {
            if (braces_ <= 0 && peek().kind == Tok::Ident &&
                std::find(std::begin(kTop), std::end(kTop), peek().text) != std::end(kTop))
                return;
            next();
        }
    }

    // ---- declarations --------------------------------------------------

    void parse_decl(ScenarioDoc& doc, bool& named) {
        const Token& kw = peek();
        if (kw.kind != Tok::Ident) expected("declaration");
        SourcePos at = pos_of(kw);
        std::string word = kw.text;
        if (word == "scenario") {
            next();
            std::string name = ident("scenario name");
            if (named) duplicate_attribute(kw, "scenario");
            named = true;
            doc.name = std::move(name);
        } else if (word == "network") {
            next();
            NetworkDecl n;
            n.pos = at;
            n.id = ident("network name");
            expect_keyword("range");
            n.min = integer();
            n.max = integer();
            expect_keyword("default");
            n.initial = integer();
            doc.networks.push_back(std::move(n));
        } else if (word == "trait" || word == "relationship" || word == "location") {
            next();
            SymbolDecl s{ident(word + " name"), at};
            auto& list = word == "trait" ? doc.traits : (word == "relationship" ? doc.relationships : doc.locations);
            list.push_back(std::move(s));
        } else if (word == "status") {
            next();
            StatusDecl s;
            s.pos = at;
            s.id = ident("status name");
            s.targeted = accept_keyword("targeted");
            expect_keyword("duration");
            s.duration = integer();
            doc.statuses.push_back(std::move(s));
        } else if (word == "character") {
            next();
            doc.characters.push_back(parse_character(at));
        } else if (word == "goals") {
            next();
            doc.goal_blocks.push_back(parse_goals(at));
        } else if (word == "exchange") {
            next();
            doc.exchanges.push_back(parse_exchange(at));
        } else if (word == "trigger") {
            next();
            TriggerRule t;
            t.pos = at;
            t.id = ident("trigger name");
            expect_keyword("when");
            t.when = condition();
            expect_keyword("then");
            t.effects = effect_block();
            doc.triggers.push_back(std::move(t));
        } else {
            fail(kw, "unknown-declaration", "unknown declaration '" + word + "'");
        }
    }

    std::vector<std::string> symbol_list(std::string_view what) {
        std::vector<std::string> out;
        out.push_back(ident(what));
        while (peek().kind == Tok::Comma) {
            next();
            out.push_back(ident(what));
        }
        return out;
    }

    CharacterDecl parse_character(SourcePos at) {
        CharacterDecl c;
        c.pos = at;
        c.id = ident("character id");
        expect(Tok::LBrace);
        bool seen_name = false, seen_gender = false, seen_race = false, seen_orientation = false,
             seen_location = false, seen_traits = false, seen_likes = false, seen_dislikes = false;
        auto once = [&](bool& seen, const Token& t) {
            if (seen) duplicate_attribute(t, t.text);
            seen = true;
        };
        while (peek().kind != Tok::RBrace) {
            const Token& t = peek();
            if (t.kind != Tok::Ident) expected("character attribute or '}'");
            Token kw = next();
            const std::string& a = kw.text;
            if (a == "name") {
                once(seen_name, kw);
                c.name = string_lit();
            } else if (a == "gender") {
                once(seen_gender, kw);
                c.gender = ident("gender");
            } else if (a == "race") {
                once(seen_race, kw);
                c.race = ident("race");
            } else if (a == "orientation") {
                once(seen_orientation, kw);
                c.orientation = ident("orientation");
            } else if (a == "location") {
                once(seen_location, kw);
                c.location = ident("location");
            } else if (a == "player") {
                c.player = true;
            } else if (a == "traits") {
                once(seen_traits, kw);
                c.traits = symbol_list("trait");
            } else if (a == "likes") {
                once(seen_likes, kw);
                c.likes = symbol_list("trait");
            } else if (a == "dislikes") {
                once(seen_dislikes, kw);
                c.dislikes = symbol_list("trait");
            } else if (auto m = score_map_from_string(a)) {
                InitialScore s;
                s.pos = pos_of(kw);
                s.map = *m;
                s.network = ident("network");
                expect(Tok::Arrow);
                s.other = ident("character id");
                expect(Tok::Assign);
                s.value = integer();
                c.scores.push_back(std::move(s));
            } else if (a == "status") {
                InitialStatus s;
                s.pos = pos_of(kw);
                s.kind = ident("status");
                if (peek().kind == Tok::Arrow) {
                    next();
                    s.target = ident("character id");
                }
                if (accept_keyword("for")) s.duration = integer();
                c.statuses.push_back(std::move(s));
            } else if (a == "relationship") {
                InitialRelationship r;
                r.pos = pos_of(kw);
                r.kind = ident("relationship kind");
                r.other = ident("character id");
                c.relationships.push_back(std::move(r));
            } else {
                fail(kw, "unknown-attribute", "unknown character attribute '" + a + "'");
            }
        }
        expect(Tok::RBrace);
        return c;
    }

    GoalBlock parse_goals(SourcePos at) {
        GoalBlock g;
        g.pos = at;
        g.network = ident("network");
        if (accept_keyword("when")) g.gate = condition();
        expect(Tok::LBrace);
        while (peek().kind != Tok::RBrace) {
            const Token& t = peek();
            if (!at_keyword("rule")) fail(t, "unknown-attribute", "expected 'rule' inside goals block");
            SourcePos rp = pos_of(next());
            g.rules.push_back(rule_body(rp));
        }
        expect(Tok::RBrace);
        return g;
    }

    InfluenceRule rule_body(SourcePos at) {
        InfluenceRule r;
        r.pos = at;
        r.id = ident("rule id");
        expect_keyword("weight");
        r.weight = weight();
        if (accept_keyword("per")) {
            expect_keyword("trait");
            r.per_trait = true;
        }
        expect_keyword("when");
        r.when = condition();
        return r;
    }

    WeightTerm weight() {
        WeightTerm w;
        if (peek().kind == Tok::Int) {
            w.kind = WeightTerm::Kind::Constant;
            w.constant = integer();
            return w;
        }
        if (peek().kind == Tok::Ident) {
            if (auto m = score_map_from_string(peek().text)) {
                next();
                w.kind = WeightTerm::Kind::Score;
                w.map = *m;
                expect(Tok::LParen);
                w.network = ident("network");
                expect(Tok::Comma);
                w.from = role();
                expect(Tok::Comma);
                w.to = role();
                expect(Tok::RParen);
                return w;
            }
            if (peek().text == "random") {
                next();
                w.kind = WeightTerm::Kind::Random;
                expect(Tok::LParen);
                w.low = integer();
                expect(Tok::Comma);
                w.high = integer();
                expect(Tok::RParen);
                return w;
            }
        }
        expected("weight (integer, value(...), goal(...), belief(...) or random(...))");
    }

    ExchangeDef parse_exchange(SourcePos at) {
        ExchangeDef x;
        x.pos = at;
        x.id = ident("exchange id");
        expect(Tok::LBrace);
        bool seen_name = false, seen_intent = false, seen_subject = false, seen_threshold = false;
        auto once = [&](bool& seen, const Token& t) {
            if (seen) duplicate_attribute(t, t.text);
            seen = true;
        };
        while (peek().kind != Tok::RBrace) {
            if (peek().kind != Tok::Ident) expected("exchange attribute or '}'");
            Token kw = next();
            const std::string& a = kw.text;
            if (a == "name") {
                once(seen_name, kw);
                x.name = string_lit();
            } else if (a == "intent") {
                once(seen_intent, kw);
                x.intent = ident("network");
            } else if (a == "subject") {
                once(seen_subject, kw);
                x.has_subject = true;
            } else if (a == "accept_above") {
                once(seen_threshold, kw);
                x.accept_threshold = integer();
            } else if (a == "pre") {
                x.preconditions.push_back(condition());
            } else if (a == "initiator" || a == "responder") {
                SourcePos rp = pos_of(peek());
                expect_keyword("rule");
                auto& list = a == "initiator" ? x.initiator_rules : x.responder_rules;
                list.push_back(rule_body(rp));
            } else if (a == "on") {
                Outcome o = outcome(false);
                auto& slot = x.effects[static_cast<std::size_t>(o)];
                if (slot) duplicate_attribute(kw, "on " + std::string(to_string(o)));
                slot = effect_block();
            } else if (a == "scene") {
                Outcome o = outcome(false);
                auto& slot = x.scenes[static_cast<std::size_t>(o)];
                if (slot) duplicate_attribute(kw, "scene " + std::string(to_string(o)));
                expect(Tok::LBrace);
                SceneTemplate s;
                expect_keyword("perform");
                s.performance = string_lit();
                expect_keyword("respond");
                s.response = string_lit();
                expect(Tok::RBrace);
                slot = std::move(s);
            } else {
                fail(kw, "unknown-attribute", "unknown exchange attribute '" + a + "'");
            }
        }
        expect(Tok::RBrace);
        return x;
    }

    std::vector<Effect> effect_block() {
        expect(Tok::LBrace);
        std::vector<Effect> out;
        while (peek().kind != Tok::RBrace) out.push_back(effect());
        expect(Tok::RBrace);
        return out;
    }

    Effect effect() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) expected("effect or '}'");
        Effect e;
        e.pos = pos_of(t);
        Token kw = next();
        if (auto m = score_map_from_string(kw.text)) {
            e.kind = Effect::Kind::ScoreDelta;
            e.map = *m;
            e.symbol = ident("network");
            e.from = role();
            expect(Tok::Arrow);
            e.to = role();
            bool plus = peek().kind == Tok::PlusEq;
            if (!plus && peek().kind != Tok::MinusEq) expected("'+=' or '-='");
            next();
            int amount = integer();
            e.amount = plus ? amount : -amount;
        } else if (kw.text == "add_status") {
            e.kind = Effect::Kind::StatusAdd;
            e.from = role();
            e.symbol = ident("status");
            if (peek().kind == Tok::Arrow) {
                next();
                e.to = role();
            }
            if (accept_keyword("for")) e.duration = integer();
        } else if (kw.text == "remove_status") {
            e.kind = Effect::Kind::StatusRemove;
            e.from = role();
            e.symbol = ident("status");
        } else if (kw.text == "relationship") {
            e.kind = Effect::Kind::RelationshipSet;
            e.symbol = ident("relationship kind");
            if (accept_keyword("on")) {
                e.active = true;
            } else if (accept_keyword("off")) {
                e.active = false;
            } else {
                expected("'on' or 'off'");
            }
        } else {
            fail(kw, "unknown-effect", "unknown effect '" + kw.text + "'");
        }
        return e;
    }

    // ---- conditions ----------------------------------------------------

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxNesting)
                p.fail(p.peek(), "nesting-too-deep", "condition nesting exceeds " + std::to_string(kMaxNesting));
        }
        ~DepthGuard() { --p.depth_; }
    };

    Condition condition() {
        DepthGuard guard(*this);
        SourcePos at = pos_of(peek());
        Condition first = unary();
        if (!at_keyword("and")) return first;
        Condition conj;
        conj.kind = Condition::Kind::And;
        conj.pos = at;
        conj.children.push_back(std::move(first));
        while (accept_keyword("and")) conj.children.push_back(unary());
        return conj;
    }

    Condition unary() {
        DepthGuard guard(*this);
        SourcePos at = pos_of(peek());
        if (accept_keyword("not")) {
            Condition c;
            c.kind = Condition::Kind::Not;
            c.pos = at;
            c.children.push_back(unary());
            return c;
        }
        if (peek().kind == Tok::LParen) {
            next();
            Condition inner = condition();
            expect(Tok::RParen);
            return inner;
        }
        return atom();
    }

    TraitArg trait_arg() {
        if (peek().kind == Tok::BoundRef) {
            const Token& t = next();
            if (t.text != "trait") fail(t, "unexpected-token", "only '@trait' can be referenced, found '@" + t.text + "'");
            return {"", true};
        }
        return {ident("trait or @trait"), false};
    }

    OutcomeSet outcome_list() {
        OutcomeSet set;
        set.insert(outcome(true));
        while (peek().kind == Tok::Pipe) {
            next();
            set.insert(outcome(true));
        }
        return set;
    }

    Condition atom() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) expected("condition");
        Condition c;
        c.pos = pos_of(t);
        Token kw = next();
        const std::string& w = kw.text;
        using K = Condition::Kind;
        if (w == "true") {
            c.kind = K::True;
        } else if (w == "orientation_compatible") {
            c.kind = K::OrientationCompatible;
        } else if (w == "has_trait" || w == "likes" || w == "dislikes") {
            c.kind = w == "has_trait" ? K::HasTrait : (w == "likes" ? K::Likes : K::Dislikes);
            expect(Tok::LParen);
            c.role = role();
            expect(Tok::Comma);
            c.trait = trait_arg();
            expect(Tok::RParen);
        } else if (w == "other_has") {
            c.kind = K::HasTrait;
            c.role = Role::Target;
            expect(Tok::LParen);
            c.trait = trait_arg();
            expect(Tok::RParen);
        } else if (w == "has_status") {
            c.kind = K::HasStatus;
            expect(Tok::LParen);
            c.role = role();
            expect(Tok::Comma);
            c.symbol = ident("status");
            if (peek().kind == Tok::Comma) {
                next();
                c.role2 = role();
            }
            expect(Tok::RParen);
        } else if (auto m = score_map_from_string(w)) {
            c.kind = K::ScoreCmp;
            c.map = *m;
            expect(Tok::LParen);
            c.symbol = ident("network");
            expect(Tok::Comma);
            c.role = role();
            expect(Tok::Comma);
            c.role2 = role();
            expect(Tok::RParen);
            c.op = cmp_op();
            c.threshold = integer();
        } else if (w == "relationship") {
            c.kind = K::Relationship;
            expect(Tok::LParen);
            c.symbol = ident("relationship kind");
            expect(Tok::RParen);
        } else if (w == "same" || w == "different") {
            c.kind = w == "same" ? K::SameAttr : K::DiffAttr;
            expect(Tok::LParen);
            const Token& a = peek();
            auto attr = a.kind == Tok::Ident ? attr_from_string(a.text) : std::nullopt;
            if (!attr) expected("'race' or 'gender'");
            next();
            c.attr = *attr;
            expect(Tok::RParen);
        } else if (w == "history" || w == "witnessed") {
            c.kind = w == "history" ? K::HistoryCmp : K::WitnessedCmp;
            expect(Tok::LParen);
            if (c.kind == K::WitnessedCmp) {
                c.role = role();
                expect(Tok::Comma);
            }
            c.symbol = ident("exchange");
            c.outcomes = OutcomeSet::all_resolved();
            if (peek().kind == Tok::Comma) {
                next();
                c.outcomes = outcome_list();
            }
            expect(Tok::RParen);
            c.op = cmp_op();
            c.threshold = integer();
        } else if (w == "volition") {
            c.kind = K::PartialVolition;
            c.op = cmp_op();
            c.threshold = integer();
        } else {
            fail(kw, "unknown-condition", "unknown condition '" + w + "'");
        }
        return c;
    }

    std::vector<Token> toks_;
    std::vector<Diagnostic>& diags_;
    std::size_t pos_ = 0;
    int braces_ = 0;
    int depth_ = 0;
};

template <typename T>
void sort_by_id(std::vector<T>& v) {
    std::stable_sort(v.begin(), v.end(), [](const T& a, const T& b) { return a.id < b.id; });
}

void sort_unique(std::vector<std::string>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

void normalize(ScenarioDoc& doc) {
    sort_by_id(doc.networks);
    sort_by_id(doc.traits);
    sort_by_id(doc.statuses);
    sort_by_id(doc.relationships);
    sort_by_id(doc.locations);
    sort_by_id(doc.characters);
    sort_by_id(doc.exchanges);
    std::stable_sort(doc.goal_blocks.begin(), doc.goal_blocks.end(),
                     [](const GoalBlock& a, const GoalBlock& b) { return a.network < b.network; });
    for (auto& c : doc.characters) {
        sort_unique(c.traits);
        sort_unique(c.likes);
        sort_unique(c.dislikes);
        std::stable_sort(c.scores.begin(), c.scores.end(), [](const InitialScore& a, const InitialScore& b) {
            return std::tie(a.map, a.network, a.other) < std::tie(b.map, b.network, b.other);
        });
        std::stable_sort(c.statuses.begin(), c.statuses.end(), [](const InitialStatus& a, const InitialStatus& b) {
            return std::tie(a.kind, a.target) < std::tie(b.kind, b.target);
        });
        std::stable_sort(c.relationships.begin(), c.relationships.end(),
                         [](const InitialRelationship& a, const InitialRelationship& b) {
                             return std::tie(a.kind, a.other) < std::tie(b.kind, b.other);
                         });
    }
}

}  // namespace

std::optional<ScenarioDoc> parse_syntax(std::string_view text, std::vector<Diagnostic>& diagnostics) {
    std::vector<Diagnostic> local;
    Lexer lexer(text, local);
    auto tokens = lexer.run();
    Parser parser(std::move(tokens), local);
    ScenarioDoc doc = parser.run();
    normalize(doc);
    diagnostics.insert(diagnostics.end(), local.begin(), local.end());
    return doc;
}

ParseResult parse(std::string_view text) {
    ParseResult result;
    auto doc = parse_syntax(text, result.diagnostics);
    if (!has_errors(result.diagnostics)) {
        auto semantic = validate(*doc);
        result.diagnostics.insert(result.diagnostics.end(), semantic.begin(), semantic.end());
    }
    std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.line, a.column) < std::tie(b.line, b.column);
    });
    if (!has_errors(result.diagnostics)) result.doc = std::move(doc);
    return result;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format_diagnostic(std::string_view file, const Diagnostic& d) {
    std::string out(file);
    out += ':' + std::to_string(d.line) + ':' + std::to_string(d.column) + ' ' + d.code + ' ';
    if (d.severity == Severity::Warning) out += "warning: ";
    out += d.message;
    return out;
}

}  // namespace socialsim::dsl
