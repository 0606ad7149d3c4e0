# tests/10_lint/test_lint__private_function_tests.py
"""Custom lint rules for test suites of private functions.

A test file that silences private-access warnings at the top is a suite
for one private function, so:

1. it is named ``test_priv__<name without leading underscore>.py``, unless
   every private call in it carries an inline ignore;
2. every ``test_priv__*.py`` starts with the three ignore comments in
   ``REQUIRED_COMMENTS``.

Tests that merely call a private helper use an inline
``# noqa: SLF001`` on that call instead.
"""

import ast
from pathlib import Path


REQUIRED_COMMENTS = (
    "# we import `_` private for testing purposes only",
    "# ruff: noqa: SLF001",
    "# pyright: reportPrivateUsage=false",
)
HEADER_LINES = 50


def _has_ignore_comments(content: str) -> bool:
    lowered = content.lower()
    return all(c.lower() in lowered for c in REQUIRED_COMMENTS[1:])


def _has_inline_ignore(line: str) -> bool:
    lowered = line.lower()
    return "# noqa: slf001" in lowered or "# pyright: ignore" in lowered


def _call_is_ignored(node: ast.Call, lines: list[str]) -> bool:
    start = node.lineno - 1
    end = (node.end_lineno or node.lineno) - 1
    candidates = {start, end, start - 1}
    return any(0 <= i < len(lines) and _has_inline_ignore(lines[i]) for i in candidates)


def _unignored_private_calls(tree: ast.AST, lines: list[str]) -> set[str]:
    return {
        node.func.attr
        for node in ast.walk(tree)
        if isinstance(node, ast.Call)
        and isinstance(node.func, ast.Attribute)
        and node.func.attr.startswith("_")
        and not node.func.attr.startswith("__")
        and not _call_is_ignored(node, lines)
    }


def _suite_files(pattern: str) -> list[Path]:
    tests_dir = Path(__file__).parent.parent
    return [
        path
        for path in sorted(tests_dir.rglob(pattern))
        if "utils" not in path.relative_to(tests_dir).parts[:-1]
        and len(path.relative_to(tests_dir).parts) >= 2  # noqa: PLR2004
    ]


def test_private_function_naming_convention() -> None:
    violations: list[str] = []
    for path in _suite_files("test_*.py"):
        content = path.read_text(encoding="utf-8")
        if not _has_ignore_comments(content):
            continue
        called = _unignored_private_calls(ast.parse(content), content.splitlines())
        expected = {f"test_priv__{name[1:]}.py" for name in called}
        if called and path.name.lower() not in {e.lower() for e in expected}:
            violations.append(f"{path.name}: expected one of {sorted(expected)}")

    if violations:
        xmsg = (
            "Private-function suites must be named test_priv__<function>.py "
            "(or use inline `# noqa: SLF001` instead):\n  " + "\n  ".join(violations)
        )
        raise AssertionError(xmsg)


def test_priv_files_have_ignore_comments() -> None:
    violations: list[str] = []
    for path in _suite_files("test_priv__*.py"):
        lines = path.read_text(encoding="utf-8").splitlines()[:HEADER_LINES]
        header = "\n".join(lines).lower()
        missing = [c for c in REQUIRED_COMMENTS if c.lower() not in header]
        if missing:
            violations.append(f"{path.name}: missing {', '.join(missing)}")

    if violations:
        xmsg = "test_priv__*.py files need the ignore header:\n  " + "\n  ".join(
            violations
        )
        raise AssertionError(xmsg)
