import subprocess
import sys
import time

import pytest
import requests

from nn_fixtures import free_port


@pytest.fixture(scope="session")
def mc_url():
    """Model-checking endpoint, reached only through its CLI and HTTP
    surfaces (started as the `neurosynt serve mc` subprocess)."""
    port = free_port()
    proc = subprocess.Popen(
        [sys.executable, "-c",
         "import sys; from neurosynt.cli import main;"
         f" sys.exit(main(['serve', 'mc', '--port', '{port}']))"],
        stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
    url = f"http://127.0.0.1:{port}"
    try:
        for _ in range(100):
            try:
                requests.get(url + "/health", timeout=1.0)
                break
            except requests.RequestException:
                time.sleep(0.1)
        else:
            raise RuntimeError("mc service did not come up")
        resp = requests.post(url + "/setup", json={"parameters": {}},
                             timeout=5.0)
        assert resp.status_code == 200 and resp.json()["success"]
        yield url
    finally:
        proc.terminate()
        proc.wait(timeout=10)
