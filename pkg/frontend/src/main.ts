// Browser entry point: connect to the service and mount the console.

import { ConsoleApp } from "./app.js";
import { connectWire } from "./protocol.js";

const params = new URLSearchParams(location.search);
const url = params.get("service")
  ?? `ws://${location.hostname || "127.0.0.1"}:${params.get("port") ?? "8765"}`;

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

new ConsoleApp({ wire: connectWire(url), root });
