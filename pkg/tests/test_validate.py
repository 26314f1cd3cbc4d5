from apecheck import parse_app, validate_app
from apecheck.apiconfig import (
    ApiConfigError, default_api_config, format_api_config, parse_api_config,
)

import pytest

from conftest import COMPLIANT, load

BASE = """app V
entry Main
activity Main
  gui label view
  lifecycle onCreate
    start Job
  end
end
"""


def diags(src):
    return validate_app(parse_app(src))


def test_thread_with_post_execute():
    src = BASE + """async Job thread owner Main
  callback background
  end
  callback postExecute
  end
end
"""
    ds = diags(src)
    assert len(ds) == 1 and ds[0].code == "async-slots"


def test_fragment_without_host():
    src = BASE + """async Job thread owner Main
  callback background
  end
end
fragment Orphan host Ghost
  lifecycle onCreate
  end
end
"""
    try:
        ds = diags(src)
    except Exception as e:  # a dangling host may already be rejected while resolving
        assert "Ghost" in str(e)
        return
    assert len(ds) == 1 and ds[0].code == "fragment-host"


def test_loader_must_be_lifecycle_aware():
    src = BASE + """async Job loader owner Main lifecycle-aware no
  callback background
  end
end
"""
    assert [d.code for d in diags(src)] == ["lifecycle-aware"]


@pytest.mark.parametrize("name", ["adsdroid", "pedometer", "gisapp", *COMPLIANT])
def test_fixtures_valid(name):
    assert validate_app(load(name)) == []


def test_task_cannot_be_lifecycle_aware():
    src = BASE + """async Job task owner Main lifecycle-aware yes
  callback background
  end
end
"""
    assert [d.code for d in diags(src)] == ["lifecycle-aware"]


def test_default_api_lists():
    api = default_api_config()
    assert "dialog.dismiss" in api.ui_access
    assert "toast.show" in api.ui_create
    assert "activity.isFinishing" in api.ui_safe
    assert set(api.post_looper) == {"post", "runOnUiThread"}
    assert api.overlaps() == []


def test_api_config_round_trip():
    api = default_api_config()
    assert parse_api_config(format_api_config(api)) == api


def test_api_config_rejects_unknown_section():
    with pytest.raises(ApiConfigError):
        parse_api_config("[nonsense]\nfoo\n")


def test_api_overlap_reported():
    api = parse_api_config("[ui-access]\nfoo\n[ui-create]\nfoo\n")
    assert api.overlaps()
