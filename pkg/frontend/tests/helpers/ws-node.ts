// Minimal RFC 6455 WebSocket client over node:net, enough for loopback
// tests against the simulation server on Node versions without a global
// WebSocket. Client frames are masked as the RFC requires; incoming text
// frames are delivered whole (the server never fragments).

import * as crypto from "node:crypto";
import * as net from "node:net";

import { SocketLike } from "../../src/net.js";

const WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11";

export function nodeWsFactory(url: string): SocketLike {
    const u = new URL(url);
    const port = Number(u.port || 80);
    const like: SocketLike = {
        send: () => {},
        close: () => {},
        onopen: null,
        onmessage: null,
        onclose: null,
        onerror: null,
    };

    const key = crypto.randomBytes(16).toString("base64");
    const socket = net.connect(port, u.hostname);
    let upgraded = false;
    let buffer = Buffer.alloc(0);

    socket.on("connect", () => {
        socket.write(
            `GET ${u.pathname} HTTP/1.1\r\n` +
                `Host: ${u.hostname}:${port}\r\n` +
                "Upgrade: websocket\r\nConnection: Upgrade\r\n" +
                `Sec-WebSocket-Key: ${key}\r\nSec-WebSocket-Version: 13\r\n\r\n`,
        );
    });

    socket.on("data", (chunk: Buffer) => {
        buffer = Buffer.concat([buffer, chunk]);
        if (!upgraded) {
            const headerEnd = buffer.indexOf("\r\n\r\n");
            if (headerEnd < 0) return;
            const head = buffer.subarray(0, headerEnd).toString("latin1");
            buffer = buffer.subarray(headerEnd + 4);
            const expected = crypto.createHash("sha1").update(key + WS_GUID).digest("base64");
            if (!head.includes("101") || !head.includes(expected)) {
                like.onerror?.();
                socket.destroy();
                return;
            }
            upgraded = true;
            like.onopen?.();
        }
        // parse complete frames
        for (;;) {
            if (buffer.length < 2) return;
            const opcode = buffer[0] & 0x0f;
            let length = buffer[1] & 0x7f;
            let offset = 2;
            if (length === 126) {
                if (buffer.length < 4) return;
                length = buffer.readUInt16BE(2);
                offset = 4;
            } else if (length === 127) {
                if (buffer.length < 10) return;
                length = Number(buffer.readBigUInt64BE(2));
                offset = 10;
            }
            if (buffer.length < offset + length) return;
            const payload = buffer.subarray(offset, offset + length);
            buffer = buffer.subarray(offset + length);
            if (opcode === 0x1) {
                like.onmessage?.(payload.toString("utf-8"));
            } else if (opcode === 0x8) {
                socket.end();
                return;
            } else if (opcode === 0x9) {
                socket.write(frame(payload, 0xa));
            }
        }
    });

    socket.on("close", () => like.onclose?.());
    socket.on("error", () => like.onerror?.());

    function frame(payload: Buffer, opcode: number): Buffer {
        const mask = crypto.randomBytes(4);
        const masked = Buffer.from(payload);
        for (let i = 0; i < masked.length; i++) masked[i] ^= mask[i % 4];
        let header: Buffer;
        if (payload.length < 126) {
            header = Buffer.from([0x80 | opcode, 0x80 | payload.length]);
        } else if (payload.length < 65536) {
            header = Buffer.alloc(4);
            header[0] = 0x80 | opcode;
            header[1] = 0x80 | 126;
            header.writeUInt16BE(payload.length, 2);
        } else {
            header = Buffer.alloc(10);
            header[0] = 0x80 | opcode;
            header[1] = 0x80 | 127;
            header.writeBigUInt64BE(BigInt(payload.length), 2);
        }
        return Buffer.concat([header, mask, masked]);
    }

    like.send = (text: string) => {
        if (upgraded) socket.write(frame(Buffer.from(text, "utf-8"), 0x1));
    };
    like.close = () => {
        socket.end();
    };
    return like;
}
