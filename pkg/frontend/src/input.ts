// Keyboard to Walk messages. While any movement key is held the current
// intent is re-sent on a fixed interval (>= 30 Hz); releasing the last key
// sends a single zeroed Walk so the avatar stops.

import { WalkOut } from "./protocol.js";

export const FORWARD_SPEED = 1.4; // m/s, preferred walking speed
export const STRAFE_SPEED = 0.8; // m/s
export const TURN_RATE = 1.5; // rad/s
export const SEND_INTERVAL_MS = 30; // ~33 Hz

const KEY_ALIASES: Record<string, string> = {
    KeyW: "forward",
    ArrowUp: "forward",
    KeyS: "back",
    ArrowDown: "back",
    KeyA: "left",
    ArrowLeft: "left",
    KeyD: "right",
    ArrowRight: "right",
    KeyQ: "turnLeft",
    KeyE: "turnRight",
};

export function walkFromKeys(pressed: ReadonlySet<string>): WalkOut {
    let forward = 0;
    let strafe = 0;
    let turn = 0;
    if (pressed.has("forward")) forward += FORWARD_SPEED;
    if (pressed.has("back")) forward -= FORWARD_SPEED;
    if (pressed.has("left")) strafe += STRAFE_SPEED; // +y is left in the world frame
    if (pressed.has("right")) strafe -= STRAFE_SPEED;
    if (pressed.has("turnLeft")) turn += TURN_RATE;
    if (pressed.has("turnRight")) turn -= TURN_RATE;
    return { tag: "walk", forward, strafe, turn };
}

export function isWalkZero(w: WalkOut): boolean {
    return w.forward === 0 && w.strafe === 0 && w.turn === 0;
}

export class InputLoop {
    private pressed = new Set<string>();
    private timer: ReturnType<typeof setInterval> | null = null;
    private zeroSent = true;

    constructor(
        private readonly send: (walk: WalkOut) => void,
        private readonly intervalMs: number = SEND_INTERVAL_MS,
    ) {}

    keyDown(code: string): boolean {
        const action = KEY_ALIASES[code];
        if (action === undefined) return false;
        this.pressed.add(action);
        this.tick(); // react immediately, then keep streaming on the interval
        return true;
    }

    keyUp(code: string): boolean {
        const action = KEY_ALIASES[code];
        if (action === undefined) return false;
        this.pressed.delete(action);
        this.tick();
        return true;
    }

    start(): void {
        if (this.timer === null) {
            this.timer = setInterval(() => this.tick(), this.intervalMs);
        }
    }

    stop(): void {
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
        this.pressed.clear();
    }

    tick(): void {
        const walk = walkFromKeys(this.pressed);
        if (isWalkZero(walk)) {
            if (!this.zeroSent) {
                this.zeroSent = true;
                this.send(walk); // exactly one zero Walk on release
            }
            return;
        }
        this.zeroSent = false;
        this.send(walk);
    }
}
