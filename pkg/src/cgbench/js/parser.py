"""Recursive-descent parser for an ECMAScript 5 subset.

Every node records the 1-based position of its first token. Composite
expressions start at their leftmost token, parentheses included, so an
immediately-invoked ``(function(){})()`` call starts at the opening paren
while the function expression itself starts at ``function``.
"""

from __future__ import annotations

from ..errors import JSParseError, UnsupportedConstruct
from .ast import Ast, Node
from .lexer import KEYWORDS, Token, decode_number, decode_string, tokenize

_BINARY_PREC = {
    "||": 1, "&&": 2, "|": 3, "^": 4, "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, ">": 7, "<=": 7, ">=": 7, "instanceof": 7, "in": 7,
    "<<": 8, ">>": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
}
_ASSIGN_OPS = frozenset({"=", "+=", "-=", "*=", "/=", "%=", "<<=", ">>=", ">>>=", "&=", "|=", "^="})
_UNARY_OPS = frozenset({"!", "~", "+", "-"})
_UNARY_WORDS = frozenset({"typeof", "void", "delete"})

# ES6+ syntax that is recognised only to be rejected with a clear message.
_UNSUPPORTED_WORDS = {
    "class": "class declaration",
    "const": "const declaration",
    "import": "module import",
    "export": "module export",
    "with": "with statement",
    "yield": "yield expression",
}


class Parser:
    def __init__(self, source: str, path: str = "<input>"):
        self.path = path
        self.toks = tokenize(source, path)
        self.i = 0
        self.tok: Token = self.toks[0]
        self.prev: Token | None = None
        self.fn_depth = 0
        self.loop_depth = 0
        self.switch_depth = 0

    # -- token helpers -------------------------------------------------------

    def next(self) -> Token:
        t = self.tok
        self.prev = t
        self.i += 1
        self.tok = self.toks[self.i]
        return t

    def peek(self) -> Token:
        return self.toks[min(self.i + 1, len(self.toks) - 1)]

    def error(self, message: str, tok: Token | None = None) -> JSParseError:
        tok = tok or self.tok
        return JSParseError(message, self.path, tok.line, tok.col)

    def unsupported(self, what: str, tok: Token | None = None) -> UnsupportedConstruct:
        tok = tok or self.tok
        return UnsupportedConstruct(what, self.path, tok.line, tok.col)

    def unexpected(self) -> JSParseError:
        t = self.tok
        if t.kind == "eof":
            return self.error("unexpected end of input")
        return self.error(f"unexpected token {t.value!r}")

    def at(self, value: str) -> bool:
        t = self.tok
        return t.value == value and (t.kind == "punct" or t.kind == "name")

    def expect(self, value: str) -> Token:
        t = self.tok
        if t.value != value or t.kind not in ("punct", "name"):
            if t.kind == "eof":
                raise self.error(f"expected {value!r} but reached end of input")
            raise self.error(f"expected {value!r} but found {t.value!r}")
        return self.next()

    def end(self):
        p = self.prev
        return (p.end_line, p.end_col)

    def semicolon(self) -> None:
        t = self.tok
        if t.kind == "punct" and t.value == ";":
            self.next()
        elif not (t.nl or t.kind == "eof" or (t.kind == "punct" and t.value == "}")):
            raise self.error(f"expected ';' but found {t.value!r}")

    def identifier(self) -> Node:
        t = self.tok
        if t.kind != "name" or t.value in KEYWORDS:
            if t.kind == "name" and t.value in _UNSUPPORTED_WORDS:
                raise self.unsupported(_UNSUPPORTED_WORDS[t.value])
            raise self.error(f"expected identifier but found {t.value!r}" if t.kind != "eof"
                             else "expected identifier but reached end of input")
        self.next()
        return Node("Identifier", (t.line, t.col), (t.end_line, t.end_col), name=t.value)

    # -- program and statements ---------------------------------------------

    def parse_program(self) -> Node:
        body = []
        while self.tok.kind != "eof":
            body.append(self.parse_statement())
        # The program spans the whole source, trailing whitespace included.
        return Node("Program", (1, 1), (self.tok.line, self.tok.col), body=body)

    def parse_statement(self) -> Node:
        t = self.tok
        if t.kind == "punct":
            if t.value == "{":
                return self.parse_block()
            if t.value == ";":
                self.next()
                return Node("EmptyStatement", (t.line, t.col), self.end())
        elif t.kind == "name":
            handler = _STATEMENTS.get(t.value)
            if handler is not None:
                return handler(self)
            if t.value in _UNSUPPORTED_WORDS:
                raise self.unsupported(_UNSUPPORTED_WORDS[t.value])
            nxt = self.peek()
            if t.value == "let" and nxt.kind in ("name", "punct") and (
                    nxt.kind == "name" or nxt.value in ("[", "{")):
                raise self.unsupported("let declaration")
            if t.value == "async" and nxt.value == "function" and not nxt.nl:
                raise self.unsupported("async function")
            if t.value not in KEYWORDS and nxt.kind == "punct" and nxt.value == ":":
                label = self.identifier()
                self.next()
                body = self.parse_statement()
                return Node("LabeledStatement", (t.line, t.col), self.end(), label=label, body=body)
        expr = self.parse_expression()
        self.semicolon()
        return Node("ExpressionStatement", (t.line, t.col), self.end(), expression=expr)

    def parse_block(self) -> Node:
        t = self.expect("{")
        body = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("expected '}' but reached end of input")
            body.append(self.parse_statement())
        self.next()
        return Node("BlockStatement", (t.line, t.col), self.end(), body=body)

    def parse_var_declarations(self, no_in: bool = False) -> list[Node]:
        decls = []
        while True:
            start = self.tok
            ident = self.identifier()
            init = None
            if self.at("="):
                self.next()
                init = self.parse_assignment(no_in)
            decls.append(Node("VariableDeclarator", (start.line, start.col), self.end(), id=ident, init=init))
            if not self.at(","):
                return decls
            self.next()

    def parse_var(self) -> Node:
        t = self.next()
        decls = self.parse_var_declarations()
        self.semicolon()
        return Node("VariableDeclaration", (t.line, t.col), self.end(), declarations=decls, kind="var")

    def parse_function_declaration(self) -> Node:
        return self.parse_function("FunctionDeclaration")

    def parse_if(self) -> Node:
        t = self.next()
        self.expect("(")
        test = self.parse_expression()
        self.expect(")")
        consequent = self.parse_statement()
        alternate = None
        if self.at("else"):
            self.next()
            alternate = self.parse_statement()
        return Node("IfStatement", (t.line, t.col), self.end(), test=test,
                    consequent=consequent, alternate=alternate)

    def parse_loop_body(self) -> Node:
        self.loop_depth += 1
        try:
            return self.parse_statement()
        finally:
            self.loop_depth -= 1

    def parse_while(self) -> Node:
        t = self.next()
        self.expect("(")
        test = self.parse_expression()
        self.expect(")")
        body = self.parse_loop_body()
        return Node("WhileStatement", (t.line, t.col), self.end(), test=test, body=body)

    def parse_do(self) -> Node:
        t = self.next()
        body = self.parse_loop_body()
        self.expect("while")
        self.expect("(")
        test = self.parse_expression()
        self.expect(")")
        if self.at(";"):
            self.next()
        return Node("DoWhileStatement", (t.line, t.col), self.end(), body=body, test=test)

    def parse_for(self) -> Node:
        t = self.next()
        if self.at("each"):
            raise self.unsupported("for each")
        self.expect("(")
        init = None
        if self.at("var"):
            vt = self.next()
            decls = self.parse_var_declarations(no_in=True)
            init = Node("VariableDeclaration", (vt.line, vt.col), self.end(), declarations=decls, kind="var")
            if len(decls) == 1:
                if self.at("in"):
                    return self._finish_for_in(t, init)
                if self.tok.value == "of" and self.tok.kind == "name":
                    raise self.unsupported("for-of loop")
        elif self.tok.kind == "name" and self.tok.value in ("let", "const") and self.peek().kind == "name":
            raise self.unsupported(f"{self.tok.value} declaration")
        elif not self.at(";"):
            init = self.parse_expression(no_in=True)
            if self.at("in"):
                if init.type not in ("Identifier", "MemberExpression"):
                    raise self.error("invalid left-hand side in for-in")
                return self._finish_for_in(t, init)
            if self.tok.value == "of" and self.tok.kind == "name":
                raise self.unsupported("for-of loop")
        self.expect(";")
        test = None if self.at(";") else self.parse_expression()
        self.expect(";")
        update = None if self.at(")") else self.parse_expression()
        self.expect(")")
        body = self.parse_loop_body()
        return Node("ForStatement", (t.line, t.col), self.end(), init=init, test=test,
                    update=update, body=body)

    def _finish_for_in(self, t: Token, left: Node) -> Node:
        self.next()
        right = self.parse_expression()
        self.expect(")")
        body = self.parse_loop_body()
        return Node("ForInStatement", (t.line, t.col), self.end(), left=left, right=right, body=body)

    def _jump(self, node_type: str) -> Node:
        t = self.next()
        label = None
        if self.tok.kind == "name" and not self.tok.nl and self.tok.value not in KEYWORDS:
            label = self.identifier()
        elif node_type == "ContinueStatement" and not self.loop_depth:
            raise self.error("illegal continue statement", t)
        elif node_type == "BreakStatement" and not (self.loop_depth or self.switch_depth):
            raise self.error("illegal break statement", t)
        self.semicolon()
        return Node(node_type, (t.line, t.col), self.end(), label=label)

    def parse_break(self) -> Node:
        return self._jump("BreakStatement")

    def parse_continue(self) -> Node:
        return self._jump("ContinueStatement")

    def parse_return(self) -> Node:
        t = self.next()
        if not self.fn_depth:
            raise self.error("illegal return statement", t)
        argument = None
        nt = self.tok
        if not (nt.nl or nt.kind == "eof" or (nt.kind == "punct" and nt.value in (";", "}"))):
            argument = self.parse_expression()
        self.semicolon()
        return Node("ReturnStatement", (t.line, t.col), self.end(), argument=argument)

    def parse_throw(self) -> Node:
        t = self.next()
        if self.tok.nl:
            raise self.error("illegal newline after throw")
        argument = self.parse_expression()
        self.semicolon()
        return Node("ThrowStatement", (t.line, t.col), self.end(), argument=argument)

    def parse_switch(self) -> Node:
        t = self.next()
        self.expect("(")
        discriminant = self.parse_expression()
        self.expect(")")
        self.expect("{")
        cases = []
        seen_default = False
        self.switch_depth += 1
        while not self.at("}"):
            ct = self.tok
            if self.at("case"):
                self.next()
                test = self.parse_expression()
            elif self.at("default"):
                if seen_default:
                    raise self.error("more than one default clause in switch")
                seen_default = True
                self.next()
                test = None
            else:
                raise self.unexpected()
            self.expect(":")
            body = []
            while not (self.at("case") or self.at("default") or self.at("}")):
                if self.tok.kind == "eof":
                    raise self.unexpected()
                body.append(self.parse_statement())
            cases.append(Node("SwitchCase", (ct.line, ct.col), self.end(), test=test, consequent=body))
        self.switch_depth -= 1
        self.next()
        return Node("SwitchStatement", (t.line, t.col), self.end(), discriminant=discriminant, cases=cases)

    def parse_try(self) -> Node:
        t = self.next()
        block = self.parse_block()
        handler = finalizer = None
        if self.at("catch"):
            ct = self.next()
            self.expect("(")
            param = self.identifier()
            self.expect(")")
            body = self.parse_block()
            handler = Node("CatchClause", (ct.line, ct.col), self.end(), param=param, body=body)
        if self.at("finally"):
            self.next()
            finalizer = self.parse_block()
        if handler is None and finalizer is None:
            raise self.error("missing catch or finally after try")
        return Node("TryStatement", (t.line, t.col), self.end(), block=block, handler=handler,
                    finalizer=finalizer)

    def parse_debugger(self) -> Node:
        t = self.next()
        self.semicolon()
        return Node("DebuggerStatement", (t.line, t.col), self.end())

    # -- functions -----------------------------------------------------------

    def parse_function(self, node_type: str) -> Node:
        t = self.next()
        if self.at("*"):
            raise self.unsupported("generator function")
        ident = None
        if node_type == "FunctionDeclaration" or not self.at("("):
            ident = self.identifier()
        self.expect("(")
        params = []
        while not self.at(")"):
            if self.at("..."):
                raise self.unsupported("rest parameter")
            if self.tok.kind != "name":
                raise self.error(f"expected parameter name but found {self.tok.value!r}"
                                 if self.tok.kind != "eof" else "unexpected end of input")
            params.append(self.identifier())
            if self.at("="):
                raise self.unsupported("default parameter")
            if not self.at(")"):
                self.expect(",")
        self.next()
        saved = self.loop_depth, self.switch_depth
        self.loop_depth = self.switch_depth = 0
        self.fn_depth += 1
        try:
            body = self.parse_block()
        finally:
            self.fn_depth -= 1
            self.loop_depth, self.switch_depth = saved
        return Node(node_type, (t.line, t.col), self.end(), id=ident, params=params, body=body)

    # -- expressions ---------------------------------------------------------

    def parse_expression(self, no_in: bool = False) -> Node:
        start = self.tok
        expr = self.parse_assignment(no_in)
        if not self.at(","):
            return expr
        exprs = [expr]
        while self.at(","):
            self.next()
            exprs.append(self.parse_assignment(no_in))
        return Node("SequenceExpression", (start.line, start.col), self.end(), expressions=exprs)

    def parse_assignment(self, no_in: bool = False) -> Node:
        start = self.tok
        left = self.parse_conditional(no_in)
        t = self.tok
        if t.kind == "punct":
            if t.value in _ASSIGN_OPS:
                if left.type not in ("Identifier", "MemberExpression"):
                    raise self.error("invalid assignment target")
                self.next()
                right = self.parse_assignment(no_in)
                return Node("AssignmentExpression", (start.line, start.col), self.end(),
                            operator=t.value, left=left, right=right)
            if t.value == "=>":
                raise self.unsupported("arrow function")
            if t.value == "**=":
                raise self.unsupported("exponent operator")
        return left

    def parse_conditional(self, no_in: bool) -> Node:
        start = self.tok
        test = self.parse_binary(1, no_in)
        if not self.at("?"):
            return test
        self.next()
        consequent = self.parse_assignment()
        self.expect(":")
        alternate = self.parse_assignment(no_in)
        return Node("ConditionalExpression", (start.line, start.col), self.end(),
                    test=test, consequent=consequent, alternate=alternate)

    def parse_binary(self, min_prec: int, no_in: bool) -> Node:
        start = self.tok
        left = self.parse_unary()
        while True:
            t = self.tok
            op = t.value
            prec = _BINARY_PREC.get(op)
            if prec is None or t.kind == "str" or prec < min_prec or (no_in and op == "in"):
                if op == "**" and t.kind == "punct":
                    raise self.unsupported("exponent operator")
                return left
            self.next()
            right = self.parse_binary(prec + 1, no_in)
            kind = "LogicalExpression" if prec <= 2 else "BinaryExpression"
            left = Node(kind, (start.line, start.col), self.end(), operator=op, left=left, right=right)

    def parse_unary(self) -> Node:
        t = self.tok
        v = t.value
        if t.kind == "punct":
            if v in _UNARY_OPS:
                self.next()
                arg = self.parse_unary()
                return Node("UnaryExpression", (t.line, t.col), self.end(), operator=v, prefix=True, argument=arg)
            if v == "++" or v == "--":
                self.next()
                arg = self.parse_unary()
                if arg.type not in ("Identifier", "MemberExpression"):
                    raise self.error("invalid update target", t)
                return Node("UpdateExpression", (t.line, t.col), self.end(), operator=v, prefix=True, argument=arg)
        elif t.kind == "name" and v in _UNARY_WORDS:
            self.next()
            arg = self.parse_unary()
            return Node("UnaryExpression", (t.line, t.col), self.end(), operator=v, prefix=True, argument=arg)
        expr = self.parse_lhs()
        t = self.tok
        if t.kind == "punct" and (t.value == "++" or t.value == "--") and not t.nl:
            if expr.type not in ("Identifier", "MemberExpression"):
                raise self.error("invalid update target", t)
            self.next()
            return Node("UpdateExpression", expr.start, self.end(), operator=t.value, prefix=False, argument=expr)
        return expr

    def parse_arguments(self) -> list[Node]:
        self.expect("(")
        args = []
        while not self.at(")"):
            if self.at("..."):
                raise self.unsupported("spread argument")
            args.append(self.parse_assignment())
            if not self.at(")"):
                self.expect(",")
        self.next()
        return args

    def parse_lhs(self, allow_call: bool = True) -> Node:
        start = self.tok
        pos = (start.line, start.col)
        if start.kind == "name" and start.value == "new":
            self.next()
            if self.at("."):
                raise self.unsupported("new.target")
            callee = self.parse_lhs(allow_call=False)
            args = self.parse_arguments() if self.at("(") else []
            expr = Node("NewExpression", pos, self.end(), callee=callee, arguments=args)
        else:
            expr = self.parse_primary()
        while True:
            t = self.tok
            if t.kind != "punct":
                return expr
            v = t.value
            if v == ".":
                self.next()
                p = self.tok
                if p.kind != "name":
                    raise self.error("expected property name after '.'")
                self.next()
                prop = Node("Identifier", (p.line, p.col), (p.end_line, p.end_col), name=p.value)
                expr = Node("MemberExpression", pos, self.end(), object=expr, property=prop, computed=False)
            elif v == "[":
                self.next()
                prop = self.parse_expression()
                self.expect("]")
                expr = Node("MemberExpression", pos, self.end(), object=expr, property=prop, computed=True)
            elif v == "(" and allow_call:
                args = self.parse_arguments()
                expr = Node("CallExpression", pos, self.end(), callee=expr, arguments=args)
            else:
                return expr

    def parse_primary(self) -> Node:
        t = self.tok
        kind = t.kind
        pos = (t.line, t.col)
        if kind == "name":
            v = t.value
            if v == "function":
                return self.parse_function("FunctionExpression")
            if v == "this":
                self.next()
                return Node("ThisExpression", pos, self.end())
            if v == "null" or v == "true" or v == "false":
                self.next()
                value = None if v == "null" else v == "true"
                return Node("Literal", pos, self.end(), value=value, raw=v, regex=None)
            if v in _UNSUPPORTED_WORDS:
                raise self.unsupported(_UNSUPPORTED_WORDS[v])
            if v in KEYWORDS:
                raise self.unexpected()
            self.next()
            if self.at("=>"):
                raise self.unsupported("arrow function")
            return Node("Identifier", pos, self.end(), name=v)
        if kind == "num":
            self.next()
            return Node("Literal", pos, self.end(), value=decode_number(t.value), raw=t.value, regex=None)
        if kind == "str":
            self.next()
            return Node("Literal", pos, self.end(), value=decode_string(t.value), raw=t.value, regex=None)
        if kind == "regex":
            self.next()
            raw = t.value
            cut = raw.rindex("/")
            return Node("Literal", pos, self.end(), value=None, raw=raw, regex=(raw[1:cut], raw[cut + 1:]))
        if kind == "punct":
            v = t.value
            if v == "(":
                self.next()
                if self.at(")"):
                    raise self.unsupported("arrow function") if self.peek().value == "=>" else self.unexpected()
                expr = self.parse_expression()
                self.expect(")")
                if self.at("=>"):
                    raise self.unsupported("arrow function")
                return expr
            if v == "[":
                return self.parse_array()
            if v == "{":
                return self.parse_object()
            if v == "...":
                raise self.unsupported("spread element")
        raise self.unexpected()

    def parse_array(self) -> Node:
        t = self.next()
        elements: list[Node | None] = []
        while not self.at("]"):
            if self.at(","):
                self.next()
                elements.append(None)
                continue
            if self.at("..."):
                raise self.unsupported("spread element")
            elements.append(self.parse_assignment())
            if not self.at("]"):
                self.expect(",")
        self.next()
        return Node("ArrayExpression", (t.line, t.col), self.end(), elements=elements)

    def parse_object(self) -> Node:
        t = self.next()
        props = []
        while not self.at("}"):
            k = self.tok
            kpos = (k.line, k.col)
            if k.kind == "name":
                nxt = self.peek()
                if k.value in ("get", "set") and nxt.kind in ("name", "str", "num"):
                    raise self.unsupported("accessor property")
                self.next()
                key = Node("Identifier", kpos, self.end(), name=k.value)
            elif k.kind == "str":
                self.next()
                key = Node("Literal", kpos, self.end(), value=decode_string(k.value), raw=k.value, regex=None)
            elif k.kind == "num":
                self.next()
                key = Node("Literal", kpos, self.end(), value=decode_number(k.value), raw=k.value, regex=None)
            elif k.kind == "punct" and k.value == "[":
                raise self.unsupported("computed property name")
            elif k.kind == "punct" and k.value == "...":
                raise self.unsupported("spread property")
            else:
                raise self.unexpected()
            if self.at("("):
                raise self.unsupported("method shorthand")
            if self.at(",") or self.at("}"):
                raise self.unsupported("shorthand property")
            self.expect(":")
            value = self.parse_assignment()
            props.append(Node("Property", kpos, self.end(), key=key, value=value, kind="init"))
            if not self.at("}"):
                self.expect(",")
        self.next()
        return Node("ObjectExpression", (t.line, t.col), self.end(), properties=props)


_STATEMENTS = {
    "var": Parser.parse_var,
    "function": Parser.parse_function_declaration,
    "if": Parser.parse_if,
    "for": Parser.parse_for,
    "while": Parser.parse_while,
    "do": Parser.parse_do,
    "break": Parser.parse_break,
    "continue": Parser.parse_continue,
    "return": Parser.parse_return,
    "throw": Parser.parse_throw,
    "switch": Parser.parse_switch,
    "try": Parser.parse_try,
    "debugger": Parser.parse_debugger,
}


def parse_program(source: str, path: str = "<input>") -> Ast:
    """Parse ``source`` into a positioned :class:`Ast`.

    Raises ``JSParseError`` on malformed input and ``UnsupportedConstruct``
    for syntax outside the ES5 subset (classes, arrow functions, ``with`` ...).
    """
    return Ast(Parser(source, path).parse_program(), path)
