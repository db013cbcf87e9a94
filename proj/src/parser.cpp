#include "hipta/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace hipta {
namespace {

enum class Tok { Name, Int, Str, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t intval = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }
  bool failed() const { return failed_; }
  const Diagnostic& error() const { return err_; }

 private:
  void fail(const std::string& msg, int line, int col) {
    if (failed_) return;
    failed_ = true;
    err_ = {Severity::Error, DiagCode::SyntaxError, msg, line, col};
    tok_ = {Tok::End, "", 0, line, col};
  }

  void advance() {
    if (failed_) return;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        col_ = 1;
        ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++col_;
        ++pos_;
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
    int line = line_, col = col_;
    if (pos_ >= src_.size()) {
      tok_ = {Tok::End, "", 0, line, col};
      return;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '$'))
        step();
      tok_ = {Tok::Name, src_.substr(start, pos_ - start), 0, line, col};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      size_t start = pos_;
      step();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) step();
      tok_ = {Tok::Int, src_.substr(start, pos_ - start), 0, line, col};
      tok_.intval = std::stoll(tok_.text);
      return;
    }
    if (c == '"') {
      step();
      std::string out;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) step();
        out.push_back(src_[pos_]);
        step();
      }
      if (pos_ >= src_.size()) {
        fail("unterminated string literal", line, col);
        return;
      }
      step();  // closing quote
      tok_ = {Tok::Str, out, 0, line, col};
      return;
    }
    static const std::string punct = "{}()[].,;:=@";
    if (punct.find(c) != std::string::npos) {
      step();
      tok_ = {Tok::Punct, std::string(1, c), 0, line, col};
      return;
    }
    fail(std::string("unexpected character '") + c + "'", line, col);
  }

  void step() {
    ++pos_;
    ++col_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
  bool failed_ = false;
  Diagnostic err_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  ParseResult run() {
    Program prog;
    while (!done_ && lex_.peek().kind != Tok::End) {
      const Token& t = lex_.peek();
      if (t.kind != Tok::Name) {
        fail("expected a declaration", t);
        break;
      }
      if (t.text == "class")
        parseClass(prog);
      else if (t.text == "proc")
        parseProc(prog);
      else if (t.text == "root")
        parseRoot(prog);
      else if (t.text == "assert")
        parseAssert(prog);
      else
        fail("unknown declaration '" + t.text + "'", t);
    }
    if (lex_.failed()) diags_.push_back(lex_.error());
    ParseResult res;
    if (!hasErrors(diags_)) {
      normalizeProgram(prog, diags_);
      if (!hasErrors(diags_)) res.program = std::move(prog);
    }
    res.diags = std::move(diags_);
    return res;
  }

 private:
  void fail(const std::string& msg, const Token& at) {
    if (done_) return;
    done_ = true;
    diags_.push_back({Severity::Error, DiagCode::SyntaxError, msg, at.line, at.col});
  }

  bool eatPunct(const char* p) {
    if (done_) return false;
    const Token& t = lex_.peek();
    if (t.kind == Tok::Punct && t.text == p) {
      lex_.take();
      return true;
    }
    fail(std::string("expected '") + p + "'", t);
    return false;
  }

  bool peekPunct(const char* p) {
    const Token& t = lex_.peek();
    return t.kind == Tok::Punct && t.text == p;
  }

  std::string eatName(const char* what) {
    if (done_) return {};
    const Token& t = lex_.peek();
    if (t.kind == Tok::Name) return lex_.take().text;
    fail(std::string("expected ") + what, t);
    return {};
  }

  bool eatKeyword(const char* kw) {
    if (done_) return false;
    const Token& t = lex_.peek();
    if (t.kind == Tok::Name && t.text == kw) {
      lex_.take();
      return true;
    }
    fail(std::string("expected '") + kw + "'", t);
    return false;
  }

  void parseClass(Program& prog) {
    lex_.take();  // class
    ClassDecl decl;
    decl.name = eatName("class name");
    if (peekPunct(":")) {
      lex_.take();
      decl.supers.push_back(eatName("superclass name"));
      while (peekPunct(",")) {
        lex_.take();
        decl.supers.push_back(eatName("superclass name"));
      }
    }
    eatPunct("{");
    while (!done_ && !peekPunct("}")) {
      const Token& t = lex_.peek();
      if (t.kind == Tok::Name && t.text == "method") {
        lex_.take();
        std::string m = eatName("method name");
        eatPunct("=");
        std::string pid = eatName("procedure name");
        eatPunct(";");
        if (!decl.methods.emplace(m, pid).second)
          diags_.push_back({Severity::Error, DiagCode::DuplicateMethodBinding,
                            "method '" + m + "' bound twice on '" + decl.name + "'", t.line, t.col});
      } else if (t.kind == Tok::Name && t.text == "abstract") {
        lex_.take();
        decl.abstracts.insert(eatName("method name"));
        eatPunct(";");
      } else {
        fail("expected 'method' or 'abstract'", t);
      }
    }
    eatPunct("}");
    prog.classes.push_back(std::move(decl));
  }

  void parseProc(Program& prog) {
    lex_.take();  // proc
    Procedure p;
    p.id = eatName("procedure name");
    eatPunct("(");
    if (!peekPunct(")")) {
      p.params.push_back(eatName("parameter name"));
      while (peekPunct(",")) {
        lex_.take();
        p.params.push_back(eatName("parameter name"));
      }
    }
    eatPunct(")");
    eatPunct("{");
    while (!done_ && !peekPunct("}")) parseStatement(p);
    eatPunct("}");
    prog.procs.push_back(std::move(p));
  }

  LValue parseLValue() {
    LValue lv;
    lv.base = eatName("variable");
    while (!done_ && (peekPunct(".") || peekPunct("["))) {
      if (peekPunct(".")) {
        lex_.take();
        lv.offsets.push_back({Offset::Kind::Field, eatName("field name"), {}});
      } else {
        lex_.take();
        const Token& t = lex_.peek();
        if (t.kind == Tok::Int) {
          lv.offsets.push_back({Offset::Kind::ConstIndex, "", ConstVal::ofInt(lex_.take().intval)});
        } else if (t.kind == Tok::Str) {
          lv.offsets.push_back({Offset::Kind::ConstIndex, "", ConstVal::ofStr(lex_.take().text)});
        } else if (t.kind == Tok::Name) {
          lv.offsets.push_back({Offset::Kind::VarIndex, lex_.take().text, {}});
        } else {
          fail("expected an index", t);
        }
        eatPunct("]");
      }
    }
    return lv;
  }

  void parseCall(Procedure& p, bool hasResult, LValue result, bool isVirtual) {
    Statement st;
    st.kind = Statement::Kind::Call;
    st.hasResult = hasResult;
    st.lhs = std::move(result);
    st.virtualCall = isVirtual;
    st.callee = eatName("callee name");
    eatPunct("(");
    if (!peekPunct(")")) {
      st.args.push_back(parseLValue());
      while (peekPunct(",")) {
        lex_.take();
        st.args.push_back(parseLValue());
      }
    }
    eatPunct(")");
    eatPunct(";");
    p.body.push_back(std::move(st));
  }

  void parseStatement(Procedure& p) {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Name) {
      fail("expected a statement", t);
      return;
    }
    if (t.text == "return") {
      lex_.take();
      Statement st;
      st.kind = Statement::Kind::Assign;
      st.lhs = LValue{"ret", {}};
      st.rhs = RValue{RValue::Kind::Path, parseLValue(), {}, {}, {}};
      eatPunct(";");
      p.body.push_back(std::move(st));
      return;
    }
    if (t.text == "vcall" || t.text == "scall") {
      bool isVirtual = lex_.take().text == "vcall";
      parseCall(p, false, {}, isVirtual);
      return;
    }
    LValue lhs = parseLValue();
    eatPunct("=");
    const Token& r = lex_.peek();
    if (r.kind == Tok::Name && (r.text == "vcall" || r.text == "scall")) {
      bool isVirtual = lex_.take().text == "vcall";
      parseCall(p, true, std::move(lhs), isVirtual);
      return;
    }
    Statement st;
    st.kind = Statement::Kind::Assign;
    st.lhs = std::move(lhs);
    if (r.kind == Tok::Name && r.text == "new") {
      lex_.take();
      st.rhs.kind = RValue::Kind::New;
      st.rhs.cls = eatName("class name");
      eatPunct("@");
      const Token& lt = lex_.peek();
      if (lt.kind == Tok::Name || lt.kind == Tok::Int)
        st.rhs.label = lex_.take().text;
      else
        fail("expected a site label", lt);
    } else if (r.kind == Tok::Int) {
      st.rhs.kind = RValue::Kind::Const;
      st.rhs.c = ConstVal::ofInt(lex_.take().intval);
    } else if (r.kind == Tok::Str) {
      st.rhs.kind = RValue::Kind::Const;
      st.rhs.c = ConstVal::ofStr(lex_.take().text);
    } else if (r.kind == Tok::Name) {
      st.rhs.kind = RValue::Kind::Path;
      st.rhs.path = parseLValue();
    } else {
      fail("expected an rvalue", r);
      return;
    }
    eatPunct(";");
    p.body.push_back(std::move(st));
  }

  void parseRoot(Program& prog) {
    lex_.take();
    prog.roots.push_back(eatName("procedure name"));
    eatPunct(";");
  }

  void parseAssert(Program& prog) {
    lex_.take();
    AliasAssertion a;
    const Token& t = lex_.peek();
    if (t.kind == Tok::Name && (t.text == "alias" || t.text == "noalias")) {
      a.mustAlias = lex_.take().text == "alias";
    } else {
      fail("expected 'alias' or 'noalias'", t);
      return;
    }
    a.proc = eatName("procedure name");
    eatPunct(".");
    a.lhsVar = eatName("variable");
    eatPunct(",");
    std::string proc2 = eatName("procedure name");
    eatPunct(".");
    a.rhsVar = eatName("variable");
    eatKeyword("expect");
    const Token& e = lex_.peek();
    if (e.kind == Tok::Name && (e.text == "pass" || e.text == "fail")) {
      a.expectPass = lex_.take().text == "pass";
    } else {
      fail("expected 'pass' or 'fail'", e);
      return;
    }
    eatPunct(";");
    if (proc2 != a.proc) {
      diags_.push_back({Severity::Error, DiagCode::BadAssertion,
                        "assertion variables must come from one procedure", 0, 0});
      return;
    }
    prog.assertions.push_back(std::move(a));
  }

  Lexer lex_;
  std::vector<Diagnostic> diags_;
  bool done_ = false;
};

}  // namespace

ParseResult parseProgram(const std::string& text) { return Parser(text).run(); }

ParseResult parseProgramFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult res;
    res.diags.push_back({Severity::Error, DiagCode::SyntaxError, "cannot open '" + path + "'"});
    return res;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseProgram(ss.str());
}

} // namespace hipta
