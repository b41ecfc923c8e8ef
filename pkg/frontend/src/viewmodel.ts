// Client-side state: the latest fully decoded snapshot, connection status,
// camera, and a rolling event log. Stale snapshots (tick older than the one
// on screen) are dropped so the displayed tick never goes backwards.

import { AckMsg, ServerMessage, SnapshotJson } from "./protocol.js";

export type ConnectionStatus = "connecting" | "active" | "disconnected" | "error";

export interface Toast {
    kind: string;
    detail: string;
    atTick: number;
}

export interface Camera {
    cx: number; // world center, meters
    cy: number;
    scale: number; // pixels per meter
}

const TOAST_KINDS = new Set([
    "vehicle_yielding",
    "collision",
    "phase_changed",
    "out_of_play_area",
]);

export const TOAST_LIFETIME_TICKS = 54; // roughly 3 s at 18.18 ticks/s

export class ViewModel {
    status: ConnectionStatus = "connecting";
    banner: string | null = null;
    ack: AckMsg | null = null;
    snapshot: SnapshotJson | null = null;
    staleDropped = 0;
    eventLog: Toast[] = [];
    toasts: Toast[] = [];
    camera: Camera = { cx: 51.5, cy: 0.0, scale: 12.0 };

    applyMessage(m: ServerMessage): void {
        switch (m.tag) {
            case "ack":
                this.ack = m;
                this.status = "active";
                this.banner = null;
                break;
            case "snapshot":
                if (this.snapshot !== null && m.snapshot.tick <= this.snapshot.tick) {
                    this.staleDropped += 1;
                    return;
                }
                this.snapshot = m.snapshot;
                this.expireToasts(m.snapshot.tick);
                break;
            case "event": {
                const toast: Toast = {
                    kind: m.kind,
                    detail: m.detail,
                    atTick: this.snapshot ? this.snapshot.tick : 0,
                };
                this.eventLog.push(toast);
                if (this.eventLog.length > 200) {
                    this.eventLog.shift();
                }
                if (TOAST_KINDS.has(m.kind)) {
                    this.toasts.push(toast);
                }
                break;
            }
            case "error":
                this.banner = `${m.code}: ${m.detail}`;
                if (m.code === "pedestrian_taken") {
                    this.status = "error";
                }
                break;
        }
    }

    expireToasts(currentTick: number): void {
        this.toasts = this.toasts.filter(
            (t) => currentTick - t.atTick < TOAST_LIFETIME_TICKS,
        );
    }

    hasToast(kind: string, detail?: string): boolean {
        return this.toasts.some(
            (t) => t.kind === kind && (detail === undefined || t.detail === detail),
        );
    }

    markDisconnected(): void {
        this.status = "disconnected";
    }
}
