// Wire protocol, version 1. One JSON object per WebSocket text frame (or per
// TCP line); see PROTOCOL.md at the repository root for the full schema.
// Unknown fields from the server are ignored; unknown tags and version
// mismatches throw DecodeError so the UI can surface them.

export const PROTOCOL_VERSION = "1";

export type Vec3Tuple = [number, number, number];
export type QuatTuple = [number, number, number, number]; // w, x, y, z

export interface TransformJson {
    pos: Vec3Tuple;
    quat: QuatTuple;
}

export interface EhmiJson {
    activated: boolean;
    color: string;
}

export interface VehicleJson {
    id: number;
    pos: Vec3Tuple;
    quat: QuatTuple;
    speed: number;
    throttle: number;
    brake: number;
    steer: number;
    ehmi: EhmiJson;
    dims: [number, number, number]; // length, width, height
}

export interface WalkerJson {
    id: number;
    root: TransformJson;
    joints: TransformJson[];
    capsules: number[][];
}

export interface EventJson {
    kind: string;
    actor: number;
    detail: string;
}

export interface SnapshotJson {
    tick: number;
    sim_time: number;
    phase: string;
    vehicles: VehicleJson[];
    walker: WalkerJson;
    audio: [number, number, number][]; // actor id, level, pan
    ambient: number;
    events: EventJson[];
}

export interface PlayAreaJson {
    tracking: [number, number, number, number];
    world: [number, number, number, number, number]; // anchor x, y, yaw, w, h
}

export interface AckMsg {
    tag: "ack";
    avatar_id: number;
    map_digest: string;
    dt_ms: number;
    play_area: PlayAreaJson;
}

export interface SnapshotMsg {
    tag: "snapshot";
    snapshot: SnapshotJson;
}

export interface EventMsg {
    tag: "event";
    kind: string;
    actor: number;
    detail: string;
}

export interface ErrorMsg {
    tag: "error";
    code: string;
    detail: string;
}

export type ServerMessage = AckMsg | SnapshotMsg | EventMsg | ErrorMsg;

export type Role = "pedestrian" | "spectator";

export interface HelloOut {
    tag: "hello";
    role: Role;
    name: string;
}

export interface WalkOut {
    tag: "walk";
    forward: number;
    strafe: number;
    turn: number;
}

export interface ScenarioOut {
    tag: "scenario";
    action: "start" | "reset";
    overrides: Record<string, unknown>;
}

export type ClientMessage = HelloOut | WalkOut | ScenarioOut;

export class DecodeError extends Error {}

export function encodeMessage(m: ClientMessage): string {
    return JSON.stringify({ ...m, v: PROTOCOL_VERSION });
}

const SERVER_TAGS = new Set(["ack", "snapshot", "event", "error"]);

export function decodeMessage(line: string): ServerMessage {
    let body: unknown;
    try {
        body = JSON.parse(line);
    } catch (e) {
        throw new DecodeError(`frame is not valid JSON: ${(e as Error).message}`);
    }
    if (typeof body !== "object" || body === null || Array.isArray(body)) {
        throw new DecodeError("frame must be a JSON object");
    }
    const msg = body as Record<string, unknown>;
    if (msg.v === undefined) {
        throw new DecodeError("frame is missing the protocol version field 'v'");
    }
    if (msg.v !== PROTOCOL_VERSION) {
        throw new DecodeError(`unsupported protocol version ${JSON.stringify(msg.v)}`);
    }
    const tag = msg.tag;
    if (typeof tag !== "string" || !SERVER_TAGS.has(tag)) {
        throw new DecodeError(`unknown message tag ${JSON.stringify(tag)}`);
    }
    switch (tag) {
        case "ack":
            if (typeof msg.dt_ms !== "number" || typeof msg.avatar_id !== "number") {
                throw new DecodeError("bad ack message");
            }
            return msg as unknown as AckMsg;
        case "snapshot": {
            const snap = msg.snapshot as SnapshotJson | undefined;
            if (!snap || typeof snap.tick !== "number" || !Array.isArray(snap.vehicles)) {
                throw new DecodeError("bad snapshot message");
            }
            return msg as unknown as SnapshotMsg;
        }
        case "event":
            if (typeof msg.kind !== "string") {
                throw new DecodeError("bad event message");
            }
            return msg as unknown as EventMsg;
        default:
            if (typeof msg.code !== "string") {
                throw new DecodeError("bad error message");
            }
            return msg as unknown as ErrorMsg;
    }
}
