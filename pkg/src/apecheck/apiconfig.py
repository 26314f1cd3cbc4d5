"""Loading of the four API lists (ui-access, ui-safe, ui-create, post-looper)."""
from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Optional

from .model import ApiConfig

SECTIONS = {
    "ui-access": "ui_access",
    "ui-safe": "ui_safe",
    "ui-create": "ui_create",
    "post-looper": "post_looper",
}


class ApiConfigError(ValueError):
    pass


def parse_api_config(text: str) -> ApiConfig:
    lists: dict = {v: [] for v in SECTIONS.values()}
    dead = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in SECTIONS:
                raise ApiConfigError(f"line {lineno}: unknown section [{name}]")
            section = SECTIONS[name]
            continue
        if section is None:
            raise ApiConfigError(f"line {lineno}: entry outside of a section")
        parts = line.split()
        api = parts[0]
        flags = parts[1:]
        if flags and (section != "ui_safe" or flags != ["dead"]):
            raise ApiConfigError(f"line {lineno}: unexpected flags {' '.join(flags)!r}")
        if api not in lists[section]:
            lists[section].append(api)
        if flags:
            dead.append(api)
    return ApiConfig(ui_access=tuple(lists["ui_access"]), ui_safe=tuple(lists["ui_safe"]),
                     ui_create=tuple(lists["ui_create"]), post_looper=tuple(lists["post_looper"]),
                     dead_probes=tuple(dead))


def format_api_config(cfg: ApiConfig) -> str:
    out = []
    for header, attr in SECTIONS.items():
        out.append(f"[{header}]")
        for api in getattr(cfg, attr):
            flag = " dead" if attr == "ui_safe" and api in cfg.dead_probes else ""
            out.append(api + flag)
        out.append("")
    return "\n".join(out)


_default: Optional[ApiConfig] = None


def default_api_config() -> ApiConfig:
    global _default
    if _default is None:
        text = resources.files("apecheck").joinpath("data/default_api.cfg").read_text()
        _default = parse_api_config(text)
    return _default


def load_api_config(path) -> ApiConfig:
    return parse_api_config(Path(path).read_text())
