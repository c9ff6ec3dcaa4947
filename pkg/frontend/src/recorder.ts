import { encodeWavPcm16, mixToMono } from "./wav.js";

export const MAX_RECORD_SECONDS = 30;

export interface RecorderHandle {
  /** Stop early and get the WAV; also called automatically at the cap. */
  stop(): Blob;
  readonly recording: boolean;
}

export interface RecorderCallbacks {
  /** Countdown tick, once per second with the seconds remaining. */
  onTick?: (secondsLeft: number) => void;
  /** Fired with the encoded WAV when the 30 s cap stops the recording. */
  onAutoStop?: (wav: Blob) => void;
}

/**
 * Capture microphone PCM through an AudioContext and encode 16-bit WAV
 * client-side, so the server's decoder surface stays WAV-only. Recording
 * is capped at 30 s with a visible countdown.
 */
export async function startRecording(
  callbacks: RecorderCallbacks = {},
): Promise<RecorderHandle> {
  const stream = await navigator.mediaDevices.getUserMedia({ audio: true });
  const context = new AudioContext();
  const source = context.createMediaStreamSource(stream);
  const processor = context.createScriptProcessor(4096, 1, 1);
  const chunks: Float32Array[] = [];
  let active = true;

  processor.onaudioprocess = (event) => {
    if (!active) return;
    chunks.push(new Float32Array(event.inputBuffer.getChannelData(0)));
  };
  source.connect(processor);
  processor.connect(context.destination);

  let secondsLeft = MAX_RECORD_SECONDS;
  callbacks.onTick?.(secondsLeft);
  const ticker = setInterval(() => {
    secondsLeft -= 1;
    callbacks.onTick?.(secondsLeft);
    if (secondsLeft <= 0) {
      const wav = finish();
      callbacks.onAutoStop?.(wav);
    }
  }, 1000);

  const finish = (): Blob => {
    if (!active) throw new Error("recorder already stopped");
    active = false;
    clearInterval(ticker);
    processor.disconnect();
    source.disconnect();
    stream.getTracks().forEach((track) => track.stop());
    const samples = mixToMono([concat(chunks)]);
    const wav = encodeWavPcm16(samples, context.sampleRate);
    void context.close();
    return new Blob([wav], { type: "audio/wav" });
  };

  return {
    stop: finish,
    get recording() {
      return active;
    },
  };
}

function concat(chunks: Float32Array[]): Float32Array {
  const total = chunks.reduce((acc, chunk) => acc + chunk.length, 0);
  const out = new Float32Array(total);
  let offset = 0;
  for (const chunk of chunks) {
    out.set(chunk, offset);
    offset += chunk.length;
  }
  return out;
}
