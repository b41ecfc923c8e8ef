// Browser entry point: canvas, keyboard, WebSocket session, audio toggle.
// Role comes from the query string (?role=spectator), pedestrian by default.

import { EngineAudio, AudioBackend } from "./audio.js";
import { InputLoop } from "./input.js";
import { fetchMapGeometry, MapGeometry } from "./map.js";
import { browserSocketFactory, SessionClient } from "./net.js";
import { Draw2D, renderFrame } from "./renderer.js";
import { ViewModel } from "./viewmodel.js";

function wsUrl(): string {
    const proto = location.protocol === "https:" ? "wss:" : "ws:";
    return `${proto}//${location.host}/ws`;
}

function main(): void {
    const canvas = document.getElementById("scene") as HTMLCanvasElement;
    const ctx = canvas.getContext("2d")!;
    const statusEl = document.getElementById("status")!;
    const logEl = document.getElementById("log")!;
    const meterEl = document.getElementById("meter")!;
    const audioButton = document.getElementById("audio") as HTMLButtonElement;
    const startButton = document.getElementById("start") as HTMLButtonElement;
    const resetButton = document.getElementById("reset") as HTMLButtonElement;

    const params = new URLSearchParams(location.search);
    const role = params.get("role") === "spectator" ? "spectator" : "pedestrian";
    const name = params.get("name") ?? `browser-${role}`;

    const view = new ViewModel();
    const client = new SessionClient(wsUrl(), role, name, browserSocketFactory, view);
    client.connect();

    let map: MapGeometry | null = null;
    fetchMapGeometry(location.origin)
        .then((m) => (map = m))
        .catch(() => (view.banner = "map geometry unavailable"));

    let audio = new EngineAudio(null);
    audioButton.onclick = () => {
        if (!audio.available) {
            const context = new AudioContext();
            audio = new EngineAudio(context as unknown as AudioBackend);
            audioButton.textContent = "audio: on";
        }
    };

    const input = new InputLoop((walk) => client.send(walk));
    if (role === "pedestrian") {
        input.start();
        window.addEventListener("keydown", (ev) => {
            if (ev.code === "Enter") client.send({ tag: "scenario", action: "start", overrides: {} });
            else if (ev.code === "KeyR") client.send({ tag: "scenario", action: "reset", overrides: {} });
            else if (input.keyDown(ev.code)) ev.preventDefault();
        });
        window.addEventListener("keyup", (ev) => {
            if (input.keyUp(ev.code)) ev.preventDefault();
        });
        startButton.onclick = () => client.send({ tag: "scenario", action: "start", overrides: {} });
        resetButton.onclick = () => client.send({ tag: "scenario", action: "reset", overrides: {} });
    } else {
        startButton.disabled = true;
        resetButton.disabled = true;
        statusEl.textContent = "spectator (input disabled)";
    }

    function resize(): void {
        canvas.width = canvas.clientWidth;
        canvas.height = canvas.clientHeight;
    }
    window.addEventListener("resize", resize);
    resize();

    function frame(): void {
        // the renderer writes only string styles, a strict subset of canvas
        renderFrame(ctx as unknown as Draw2D, canvas.width, canvas.height, view, map);
        statusEl.textContent = `${role} | ${view.status}${view.banner ? " | " + view.banner : ""}`;
        const snap = view.snapshot;
        if (snap) {
            audio.update(snap.audio, snap.ambient);
            if (!audio.available) {
                meterEl.textContent = snap.audio
                    .map(([id, level, pan]) => `#${id} level=${level.toFixed(2)} pan=${pan.toFixed(2)}`)
                    .join("  ");
            } else {
                meterEl.textContent = "";
            }
        }
        logEl.textContent = view.eventLog
            .slice(-8)
            .map((t) => (t.detail ? `${t.kind}: ${t.detail}` : t.kind))
            .join("\n");
        requestAnimationFrame(frame);
    }
    requestAnimationFrame(frame);
}

window.addEventListener("load", main);
