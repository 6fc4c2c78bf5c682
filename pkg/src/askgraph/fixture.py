"""In-process SPARQL endpoint over an in-memory triple list.

Desk-scale stand-in for a live RDF engine: it loads N-Triples files, answers
the query shapes this engine generates (basic graph patterns with OPTIONAL,
DISTINCT, LIMIT, ASK, regex filters, and a substring-based ``bif:contains``),
and serves them over HTTP using the SPARQL protocol and JSON results format.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .sparql import RDFTerm, RESULTS_JSON, STARDOG_TEXT_MATCH

Triple = tuple[RDFTerm, RDFTerm, RDFTerm]


class QueryParseError(ValueError):
    pass


# --- N-Triples ----------------------------------------------------------------

_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\"}


def _unescape(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        code = raw[i + 1]
        if code in _ESCAPES:
            out.append(_ESCAPES[code])
            i += 2
        elif code == "u":
            out.append(chr(int(raw[i + 2 : i + 6], 16)))
            i += 6
        elif code == "U":
            out.append(chr(int(raw[i + 2 : i + 10], 16)))
            i += 10
        else:
            raise ValueError(f"bad escape \\{code}")
    return "".join(out)


_NT_TERM_RE = re.compile(
    r"""\s*(?:
        <(?P<iri>[^>]*)>
      | _:(?P<bnode>\w+)
      | "(?P<lit>(?:[^"\\]|\\.)*)"
        (?:\^\^<(?P<dt>[^>]*)>|@(?P<lang>[A-Za-z0-9-]+))?
    )""",
    re.VERBOSE,
)


def _nt_term(line: str, pos: int) -> tuple[RDFTerm, int]:
    match = _NT_TERM_RE.match(line, pos)
    if not match:
        raise ValueError(f"cannot parse term at column {pos}")
    if match.group("iri") is not None:
        term = RDFTerm.iri(match.group("iri"))
    elif match.group("bnode") is not None:
        term = RDFTerm("bnode", match.group("bnode"))
    else:
        term = RDFTerm.literal(
            _unescape(match.group("lit")),
            datatype=match.group("dt"),
            lang=match.group("lang"),
        )
    return term, match.end()


def parse_ntriples(text: str) -> list[Triple]:
    triples = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            subject, pos = _nt_term(line, 0)
            predicate, pos = _nt_term(line, pos)
            obj, pos = _nt_term(line, pos)
        except ValueError as exc:
            raise ValueError(f"line {line_no}: {exc}") from exc
        if line[pos:].strip() != ".":
            raise ValueError(f"line {line_no}: expected terminating '.'")
        triples.append((subject, predicate, obj))
    return triples


# --- query model ---------------------------------------------------------------

_CONTAINS_PREDICATES = {"bif:contains", STARDOG_TEXT_MATCH}


@dataclass
class _Pattern:
    subject: object  # RDFTerm or str variable name
    predicate: object
    object: object


@dataclass
class _ContainsFilter:
    var: str
    keywords: list[str]


@dataclass
class _RegexFilter:
    var: str
    pattern: str


@dataclass
class _OptionalGroup:
    items: list


@dataclass
class _Query:
    form: str  # "select" | "ask"
    variables: list[str]
    distinct: bool
    items: list
    limit: int | None


_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<iri><[^>]*>)
      | (?P<var>\?\w+)
      | (?P<string>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
      | (?P<punct>[{}().,])
      | (?P<caret>\^\^)
      | (?P<at>@[A-Za-z0-9-]+)
      | (?P<number>\d+)
      | (?P<word>[A-Za-z_][A-Za-z0-9_:]*)
    )""",
    re.VERBOSE,
)


def _tokenize(query: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(query):
        match = _TOKEN_RE.match(query, pos)
        if not match or match.end() == pos:
            if query[pos:].strip() == "":
                break
            raise QueryParseError(f"syntax error at column {pos}: {query[pos:pos+20]!r}")
        pos = match.end()
        kind = match.lastgroup
        tokens.append((kind, match.group(kind)))
    return tokens


class _Parser:
    def __init__(self, query: str):
        self.tokens = _tokenize(query)
        self.pos = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str]:
        token = self.peek()
        if token is None:
            raise QueryParseError("unexpected end of query")
        self.pos += 1
        return token

    def expect_word(self, *words: str) -> str:
        kind, value = self.next()
        if kind != "word" or value.upper() not in words:
            raise QueryParseError(f"expected {'/'.join(words)}, got {value!r}")
        return value.upper()

    def expect_punct(self, punct: str) -> None:
        kind, value = self.next()
        if kind != "punct" or value != punct:
            raise QueryParseError(f"expected {punct!r}, got {value!r}")

    def parse(self) -> _Query:
        kind, value = self.next()
        if kind != "word":
            raise QueryParseError(f"expected SELECT or ASK, got {value!r}")
        keyword = value.upper()
        if keyword == "SELECT":
            return self._parse_select()
        if keyword == "ASK":
            self.expect_punct("{")
            items = self._parse_group()
            return _Query("ask", [], False, items, None)
        raise QueryParseError(f"unsupported query form {value!r}")

    def _parse_select(self) -> _Query:
        distinct = False
        token = self.peek()
        if token and token[0] == "word" and token[1].upper() == "DISTINCT":
            self.next()
            distinct = True
        variables = []
        while True:
            token = self.peek()
            if token and token[0] == "var":
                variables.append(self.next()[1][1:])
            else:
                break
        if not variables:
            raise QueryParseError("SELECT requires at least one variable")
        token = self.peek()
        if token and token[0] == "word" and token[1].upper() == "WHERE":
            self.next()
        self.expect_punct("{")
        items = self._parse_group()
        limit = None
        token = self.peek()
        if token and token[0] == "word" and token[1].upper() == "LIMIT":
            self.next()
            kind, value = self.next()
            if kind != "number":
                raise QueryParseError(f"LIMIT requires an integer, got {value!r}")
            limit = int(value)
        if self.peek() is not None:
            raise QueryParseError(f"trailing tokens: {self.peek()[1]!r}")
        return _Query("select", variables, distinct, items, limit)

    def _parse_group(self) -> list:
        items: list = []
        while True:
            token = self.peek()
            if token is None:
                raise QueryParseError("unterminated group")
            kind, value = token
            if kind == "punct" and value == "}":
                self.next()
                return items
            if kind == "punct" and value == ".":
                self.next()
                continue
            if kind == "word" and value.upper() == "OPTIONAL":
                self.next()
                self.expect_punct("{")
                items.append(_OptionalGroup(self._parse_group()))
                continue
            if kind == "word" and value.upper() == "FILTER":
                self.next()
                items.append(self._parse_regex_filter())
                continue
            items.append(self._parse_triple())

    def _parse_regex_filter(self) -> _RegexFilter:
        self.expect_punct("(")
        self.expect_word("REGEX")
        self.expect_punct("(")
        self.expect_word("STR")
        self.expect_punct("(")
        kind, value = self.next()
        if kind != "var":
            raise QueryParseError("regex filter requires a variable")
        var = value[1:]
        self.expect_punct(")")
        self.expect_punct(",")
        pattern = self._string_value()
        token = self.peek()
        if token and token[0] == "punct" and token[1] == ",":
            self.next()
            self._string_value()  # flags; only "i" is generated
        self.expect_punct(")")
        self.expect_punct(")")
        return _RegexFilter(var, pattern)

    def _string_value(self) -> str:
        kind, value = self.next()
        if kind != "string":
            raise QueryParseError(f"expected string, got {value!r}")
        return _unescape(value[1:-1])

    def _parse_triple(self):
        subject = self._term()
        kind, value = self.next()
        if kind == "iri" and value[1:-1] in _CONTAINS_PREDICATES:
            if not isinstance(subject, str):
                raise QueryParseError("contains filter requires a variable subject")
            expr = self._string_value()
            keywords = re.findall(r'"([^"]*)"', expr) or [expr]
            return _ContainsFilter(subject, [k for k in keywords if k])
        self.pos -= 1
        predicate = self._term()
        obj = self._term()
        return _Pattern(subject, predicate, obj)

    def _term(self):
        kind, value = self.next()
        if kind == "var":
            return value[1:]
        if kind == "iri":
            return RDFTerm.iri(value[1:-1])
        if kind == "string":
            literal = _unescape(value[1:-1])
            token = self.peek()
            if token and token[0] == "caret":
                self.next()
                kind2, value2 = self.next()
                if kind2 != "iri":
                    raise QueryParseError("datatype must be an IRI")
                return RDFTerm.literal(literal, datatype=value2[1:-1])
            if token and token[0] == "at":
                self.next()
                return RDFTerm.literal(literal, lang=token[1][1:])
            return RDFTerm.literal(literal)
        raise QueryParseError(f"cannot use {value!r} in a triple pattern")


# --- evaluation -----------------------------------------------------------------


def _sort_key(triple: Triple):
    return tuple(
        (t.kind, t.value, t.datatype or "", t.lang or "") for t in triple
    )


class FixtureStore:
    """Sorted in-memory triple list with a tiny SPARQL evaluator."""

    def __init__(self, triples: list[Triple]):
        self.triples = sorted(triples, key=_sort_key)

    @classmethod
    def from_ntriples(cls, path: str) -> "FixtureStore":
        with open(path, encoding="utf-8") as handle:
            return cls(parse_ntriples(handle.read()))

    def query(self, query_text: str) -> dict:
        """Evaluate and return a SPARQL JSON results document (as a dict)."""
        query = _Parser(query_text).parse()
        solutions = self._eval_group(query.items, [{}])
        if query.form == "ask":
            return {"head": {}, "boolean": bool(solutions)}
        rows = []
        seen = set()
        for solution in solutions:
            row = {
                var: solution[var] for var in query.variables if var in solution
            }
            key = tuple(sorted(row.items()))
            if query.distinct:
                if key in seen:
                    continue
                seen.add(key)
            rows.append(row)
        if query.limit is not None:
            rows = rows[: query.limit]
        return {
            "head": {"vars": query.variables},
            "results": {
                "bindings": [
                    {var: _term_to_json(term) for var, term in row.items()}
                    for row in rows
                ]
            },
        }

    def _eval_group(self, items: list, solutions: list[dict]) -> list[dict]:
        for item in items:
            if isinstance(item, _Pattern):
                solutions = [
                    extended
                    for solution in solutions
                    for extended in self._match(item, solution)
                ]
            elif isinstance(item, _ContainsFilter):
                solutions = [
                    s for s in solutions if _contains_ok(s.get(item.var), item.keywords)
                ]
            elif isinstance(item, _RegexFilter):
                regex = re.compile(item.pattern, re.IGNORECASE)
                solutions = [
                    s
                    for s in solutions
                    if item.var in s and regex.search(s[item.var].value)
                ]
            elif isinstance(item, _OptionalGroup):
                merged = []
                for solution in solutions:
                    extensions = self._eval_group(item.items, [solution])
                    merged.extend(extensions if extensions else [solution])
                solutions = merged
        return solutions

    def _match(self, pattern: _Pattern, solution: dict):
        want = []
        for position in (pattern.subject, pattern.predicate, pattern.object):
            if isinstance(position, str):
                want.append(solution.get(position, position))
            else:
                want.append(position)
        for triple in self.triples:
            bindings = dict(solution)
            for expected, actual in zip(want, triple):
                if isinstance(expected, str):  # unbound variable
                    if expected in bindings and bindings[expected] != actual:
                        break
                    bindings[expected] = actual
                elif expected != actual:
                    break
            else:
                yield bindings


def _contains_ok(term: RDFTerm | None, keywords: list[str]) -> bool:
    if term is None or term.kind != "literal":
        return False
    haystack = term.value.lower()
    return any(k.lower() in haystack for k in keywords)


def _term_to_json(term: RDFTerm) -> dict:
    if term.kind == "iri":
        return {"type": "uri", "value": term.value}
    if term.kind == "bnode":
        return {"type": "bnode", "value": term.value}
    data = {"type": "literal", "value": term.value}
    if term.datatype:
        data["datatype"] = term.datatype
    if term.lang:
        data["xml:lang"] = term.lang
    return data


# --- HTTP endpoint --------------------------------------------------------------


class FixtureServer:
    """Serves a FixtureStore over the SPARQL protocol on a local port."""

    def __init__(self, store: FixtureStore, host: str = "127.0.0.1", port: int = 0):
        self.store = store
        self.request_count = 0
        self.before_query = None  # test hook: callable(query_text)
        self._lock = threading.Lock()
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def _handle(self, query: str | None):
                with server._lock:
                    server.request_count += 1
                if server.before_query is not None:
                    server.before_query(query or "")
                if not query:
                    self._reply(400, "text/plain", b"missing query parameter")
                    return
                try:
                    payload = server.store.query(query)
                except QueryParseError as exc:
                    self._reply(400, "text/plain", str(exc).encode())
                    return
                body = json.dumps(payload).encode()
                self._reply(200, RESULTS_JSON, body)

            def _reply(self, status: int, content_type: str, body: bytes):
                try:
                    self.send_response(status)
                    self.send_header("Content-Type", content_type)
                    self.send_header("Content-Length", str(len(body)))
                    self.end_headers()
                    self.wfile.write(body)
                except (BrokenPipeError, ConnectionResetError):
                    pass  # client gave up (timeout tests)

            def do_POST(self):
                length = int(self.headers.get("Content-Length", "0"))
                form = parse_qs(self.rfile.read(length).decode())
                self._handle(form.get("query", [None])[0])

            def do_GET(self):
                params = parse_qs(urlparse(self.path).query)
                self._handle(params.get("query", [None])[0])

        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._httpd.daemon_threads = True
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/sparql"

    def start(self) -> "FixtureServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self) -> "FixtureServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
