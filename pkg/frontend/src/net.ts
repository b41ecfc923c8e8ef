// Connection and handshake. The socket is injected so tests can speak the
// same protocol over any transport; the browser uses a WebSocket to /ws.

import { ClientMessage, decodeMessage, DecodeError, encodeMessage, Role } from "./protocol.js";
import { ViewModel } from "./viewmodel.js";

export interface SocketLike {
    send(text: string): void;
    close(): void;
    onopen: (() => void) | null;
    onmessage: ((data: string) => void) | null;
    onclose: (() => void) | null;
    onerror: (() => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export const RETRY_MS = 2000;

export class SessionClient {
    private socket: SocketLike | null = null;
    private retryTimer: ReturnType<typeof setTimeout> | null = null;
    private closed = false;

    constructor(
        private readonly url: string,
        private readonly role: Role,
        private readonly name: string,
        private readonly factory: SocketFactory,
        readonly view: ViewModel,
        private readonly retryMs: number = RETRY_MS,
    ) {}

    connect(): void {
        this.view.status = "connecting";
        let socket: SocketLike;
        try {
            socket = this.factory(this.url);
        } catch {
            this.scheduleRetry();
            return;
        }
        this.socket = socket;
        socket.onopen = () => {
            socket.send(encodeMessage({ tag: "hello", role: this.role, name: this.name }));
        };
        socket.onmessage = (data) => {
            let message;
            try {
                message = decodeMessage(data);
            } catch (e) {
                if (e instanceof DecodeError) {
                    this.view.banner = e.message; // e.g. wrong protocol version
                    this.view.status = "error";
                    return;
                }
                throw e;
            }
            this.view.applyMessage(message);
        };
        socket.onclose = () => {
            if (!this.closed) {
                this.view.markDisconnected();
                this.scheduleRetry();
            }
        };
        socket.onerror = () => {
            this.view.markDisconnected();
        };
    }

    private scheduleRetry(): void {
        if (this.closed || this.retryTimer !== null) return;
        this.retryTimer = setTimeout(() => {
            this.retryTimer = null;
            this.connect();
        }, this.retryMs);
    }

    send(message: ClientMessage): void {
        if (this.socket !== null && this.view.status === "active") {
            this.socket.send(encodeMessage(message));
        }
    }

    close(): void {
        this.closed = true;
        if (this.retryTimer !== null) {
            clearTimeout(this.retryTimer);
            this.retryTimer = null;
        }
        this.socket?.close();
    }
}

export function browserSocketFactory(url: string): SocketLike {
    const ws = new WebSocket(url);
    const like: SocketLike = {
        send: (text) => ws.send(text),
        close: () => ws.close(),
        onopen: null,
        onmessage: null,
        onclose: null,
        onerror: null,
    };
    ws.onopen = () => like.onopen?.();
    ws.onmessage = (ev) => like.onmessage?.(typeof ev.data === "string" ? ev.data : "");
    ws.onclose = () => like.onclose?.();
    ws.onerror = () => like.onerror?.();
    return like;
}
