// Engine-hum audio driven by the broadcast per-vehicle levels. The node
// graph (oscillator -> gain -> stereo panner -> destination) takes its gain
// from the broadcast level and its pan from the broadcast pan verbatim.
// When no audio backend exists the levels are still tracked so the UI can
// show a numeric meter instead.

export interface ParamLike {
    value: number;
}

export interface OscillatorLike {
    type: string;
    frequency: ParamLike;
    connect(target: unknown): void;
    start(): void;
    stop(): void;
}

export interface GainLike {
    gain: ParamLike;
    connect(target: unknown): void;
}

export interface PannerLike {
    pan: ParamLike;
    connect(target: unknown): void;
}

export interface AudioBackend {
    createOscillator(): OscillatorLike;
    createGain(): GainLike;
    createStereoPanner(): PannerLike;
    destination: unknown;
}

export interface EngineChannel {
    osc: OscillatorLike;
    gain: GainLike;
    panner: PannerLike;
}

export const AMBIENT_GAIN = 0.08;
export const ENGINE_BASE_HZ = 70;
export const ENGINE_SPREAD_HZ = 50;

export class EngineAudio {
    readonly channels = new Map<number, EngineChannel>();
    private ambient: GainLike | null = null;
    private meter = new Map<number, { level: number; pan: number }>();
    private ambientLevel = 0;

    constructor(private readonly backend: AudioBackend | null) {}

    get available(): boolean {
        return this.backend !== null;
    }

    update(audio: [number, number, number][], ambient: number): void {
        this.ambientLevel = ambient;
        this.meter = new Map(audio.map(([id, level, pan]) => [id, { level, pan }]));
        if (this.backend === null) {
            return; // meter fallback only
        }
        if (this.ambient === null) {
            const osc = this.backend.createOscillator();
            osc.type = "triangle";
            osc.frequency.value = 45;
            this.ambient = this.backend.createGain();
            this.ambient.gain.value = AMBIENT_GAIN;
            osc.connect(this.ambient);
            this.ambient.connect(this.backend.destination);
            osc.start();
        }
        const seen = new Set<number>();
        for (const [actorId, level, pan] of audio) {
            seen.add(actorId);
            let channel = this.channels.get(actorId);
            if (channel === undefined) {
                channel = this.createChannel();
                this.channels.set(actorId, channel);
            }
            channel.gain.gain.value = level;
            channel.panner.pan.value = pan;
            channel.osc.frequency.value = ENGINE_BASE_HZ + ENGINE_SPREAD_HZ * level;
        }
        for (const [actorId, channel] of this.channels) {
            if (!seen.has(actorId)) {
                channel.gain.gain.value = 0;
            }
        }
    }

    private createChannel(): EngineChannel {
        const backend = this.backend!;
        const osc = backend.createOscillator();
        osc.type = "sawtooth";
        const gain = backend.createGain();
        gain.gain.value = 0;
        const panner = backend.createStereoPanner();
        osc.connect(gain);
        gain.connect(panner);
        panner.connect(backend.destination);
        osc.start();
        return { osc, gain, panner };
    }

    meterLevels(): { actorId: number; level: number; pan: number }[] {
        return [...this.meter.entries()].map(([actorId, v]) => ({ actorId, ...v }));
    }

    meterAmbient(): number {
        return this.ambientLevel;
    }
}
