"""FastAPI application factory: control socket, stem files and health/config.

Routes:

- ``WS /ws`` — one session per connection; JSON text frames in, JSON text
  frames out, one reply per client frame.  Malformed frames get an ``error``
  reply and the connection stays open.
- ``GET /stems/manifest.txt`` and ``GET /stems/<instrument>.wav`` — the
  exported stem bank, served byte-identical from disk.
- ``GET /healthz`` and ``GET /config`` — liveness and the active settings.
- optional static UI mounted at ``/`` when a UI directory is configured.

A background task sweeps the session registry and closes sockets whose
session has been idle past the configured timeout.
"""

from __future__ import annotations

import asyncio
import contextlib
import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import ValidationError

from .. import __version__
from ..config import AppConfig
from ..gainmap import InstrumentId
from ..stems import MANIFEST_NAME, export_stems, generate_stems, stem_filename
from .models import ErrorMessage, parse_client_message
from .sessions import SessionRegistry

log = logging.getLogger("tiltmix.service")

_STEM_FILES = frozenset(stem_filename(iid) for iid in InstrumentId)


@dataclass
class ServiceSettings:
    """Runtime wiring for one service process."""

    config: AppConfig = field(default_factory=AppConfig)
    stems_dir: Path = Path("stems")
    ui_dir: Path | None = None
    reap_interval_s: float = 15.0


def ensure_stems(settings: ServiceSettings) -> None:
    """Export the stem bank for the configured seed unless already on disk."""
    manifest = Path(settings.stems_dir) / MANIFEST_NAME
    if manifest.exists():
        return
    cfg = settings.config
    log.info("exporting stem bank (seed=%d) to %s", cfg.seed, settings.stems_dir)
    bank = generate_stems(cfg.seed, sample_rate_hz=cfg.sample_rate_hz, bpm=cfg.bpm)
    export_stems(bank, settings.stems_dir)


def _error_text(exc: ValidationError) -> str:
    summary = str(exc).splitlines()
    return summary[0] if summary else "invalid message"


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings if settings is not None else ServiceSettings()
    stems_dir = Path(settings.stems_dir)
    registry = SessionRegistry(settings.config)
    sockets: dict[str, WebSocket] = {}

    async def _reap_idle_sessions() -> None:
        while True:
            await asyncio.sleep(settings.reap_interval_s)
            for session in registry.expire_idle(time.monotonic()):
                socket = sockets.pop(session.id, None)
                if socket is None:
                    continue
                try:
                    await socket.close(code=1000, reason="idle timeout")
                except Exception:  # pragma: no cover - socket already gone
                    log.debug("close failed for idle session %s", session.id)

    @contextlib.asynccontextmanager
    async def lifespan(_: FastAPI):
        await asyncio.to_thread(ensure_stems, settings)
        reaper = asyncio.create_task(_reap_idle_sessions())
        try:
            yield
        finally:
            reaper.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await reaper

    app = FastAPI(title="tiltmix", version=__version__, lifespan=lifespan)
    app.state.settings = settings
    app.state.registry = registry

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok", "sessions": len(registry)}

    @app.get("/config")
    async def get_config() -> dict:
        return dataclasses.asdict(settings.config)

    @app.get("/stems/{filename}")
    async def get_stem_file(filename: str) -> FileResponse:
        if filename == MANIFEST_NAME:
            media_type = "text/plain"
        elif filename in _STEM_FILES:
            media_type = "audio/wav"
        else:
            raise HTTPException(status_code=404, detail="unknown stem file")
        path = stems_dir / filename
        if not path.is_file():
            raise HTTPException(status_code=404, detail="stem bank not exported")
        return FileResponse(path, media_type=media_type)

    @app.websocket("/ws")
    async def control_socket(websocket: WebSocket) -> None:
        await websocket.accept()
        session = registry.create()
        sockets[session.id] = websocket
        try:
            while True:
                text = await websocket.receive_text()
                try:
                    message = parse_client_message(text)
                except ValidationError as exc:
                    reply = ErrorMessage(code="bad_message", text=_error_text(exc))
                else:
                    reply = session.handle(message)
                await websocket.send_text(reply.model_dump_json())
        except WebSocketDisconnect:
            pass
        finally:
            sockets.pop(session.id, None)
            registry.remove(session.id)

    if settings.ui_dir is not None and Path(settings.ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=settings.ui_dir, html=True), name="ui")

    return app
