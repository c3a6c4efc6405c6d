from app.core.config import Settings, settings


def test_cors_origins_read_as_json_list(monkeypatch):
    monkeypatch.setenv("CORS_ORIGINS", '["http://lab.local", "http://127.0.0.1:8080"]')
    assert Settings().CORS_ORIGINS == ["http://lab.local", "http://127.0.0.1:8080"]


def test_defaults():
    assert isinstance(settings.CORS_ORIGINS, list)
    assert settings.EXACT_DIAMETER_LIMIT == 10000
    assert not hasattr(settings, "OUTPUT_DIR")
