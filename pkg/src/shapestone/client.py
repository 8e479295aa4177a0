"""Minimal client for the service API.

By default calls are dispatched in-process through the ASGI app, so the CLI
works without a running server; pointing the client at a base URL switches
the same calls to plain HTTP.
"""

from __future__ import annotations

import asyncio
from typing import Any, Optional

import httpx


class ServiceClient:
    def __init__(self, base_url: Optional[str] = None, timeout: float = 600.0):
        self.base_url = base_url
        self.timeout = timeout

    def post(self, path: str, payload: dict[str, Any]) -> tuple[int, dict[str, Any]]:
        if self.base_url is not None:
            response = httpx.post(
                self.base_url.rstrip("/") + path, json=payload, timeout=self.timeout
            )
            return response.status_code, response.json()
        return asyncio.run(self._post_inprocess(path, payload))

    async def _post_inprocess(self, path: str, payload: dict[str, Any]) -> tuple[int, dict[str, Any]]:
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://shapestone.internal", timeout=self.timeout
        ) as client:
            response = await client.post(path, json=payload)
            return response.status_code, response.json()
