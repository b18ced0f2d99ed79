/** Boots the Python simulation service once for the whole test run. */
import { spawn, type ChildProcess } from "node:child_process";

const PORT = 8761;
let server: ChildProcess | null = null;

async function waitForReady(): Promise<void> {
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const response = await fetch(`http://127.0.0.1:${PORT}/api/v1/gates`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("simulation service did not start");
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
}

export async function setup(): Promise<void> {
  server = spawn(
    "python3",
    ["-m", "uvicorn", "--factory", "psitrum.service:create_app", "--port", String(PORT), "--log-level", "warning"],
    { stdio: "inherit", cwd: new URL("../..", import.meta.url).pathname },
  );
  process.env["PSITRUM_TEST_BASE"] = `http://127.0.0.1:${PORT}`;
  await waitForReady();
}

export async function teardown(): Promise<void> {
  server?.kill("SIGTERM");
}
