// Webcam capture loop and the augmented-reality overlay.
//
// Frames are grabbed from a FrameSource (the webcam in production, a
// synthetic source in tests), downscaled to at most 1920x1080, encoded as
// PNG and streamed as binary messages. Sending is paced by the server's
// frame_detections acknowledgments so a slow pipeline never gets flooded;
// the overlay always draws the latest acknowledged detections, one frame
// behind at most.

import type { DetectionItem } from "./protocol.js";
import type { ConsoleStore } from "./state.js";

export const MAX_FRAME_W = 1920;
export const MAX_FRAME_H = 1080;

export interface FrameSource {
  // next encoded frame, or null when the source has ended
  next(): Promise<Blob | null>;
  stop(): void;
}

export async function webcamSource(video: HTMLVideoElement): Promise<FrameSource> {
  const stream = await navigator.mediaDevices.getUserMedia({
    video: { width: { ideal: MAX_FRAME_W }, height: { ideal: MAX_FRAME_H } },
    audio: false,
  });
  video.srcObject = stream;
  await video.play();
  const canvas = document.createElement("canvas");

  return {
    async next() {
      const scale = Math.min(
        1,
        MAX_FRAME_W / (video.videoWidth || MAX_FRAME_W),
        MAX_FRAME_H / (video.videoHeight || MAX_FRAME_H),
      );
      canvas.width = Math.round((video.videoWidth || MAX_FRAME_W) * scale);
      canvas.height = Math.round((video.videoHeight || MAX_FRAME_H) * scale);
      const ctx = canvas.getContext("2d");
      if (!ctx) return null;
      ctx.drawImage(video, 0, 0, canvas.width, canvas.height);
      return new Promise((resolve) => canvas.toBlob(resolve, "image/png"));
    },
    stop() {
      for (const track of stream.getTracks()) track.stop();
      video.srcObject = null;
    },
  };
}

export interface CaptureLoop {
  stop(): Promise<void>;
}

// Pump frames while the take is open. Each send waits for the previous
// acknowledgment (store.sendFrame refuses while one is in flight).
export function startCaptureLoop(store: ConsoleStore, source: FrameSource,
                                 idleMs = 10): CaptureLoop {
  let running = true;
  const done = (async () => {
    while (running) {
      if (!store.state.frameAcked) {
        await sleep(idleMs);
        continue;
      }
      const frame = await source.next();
      if (frame === null || !running) break;
      store.sendFrame(frame);
    }
  })();
  return {
    async stop() {
      running = false;
      source.stop();
      await done;
    },
  };
}

function sleep(ms: number): Promise<void> {
  return new Promise((r) => setTimeout(r, ms));
}

// -- overlay ---------------------------------------------------------------

export function drawOverlay(canvas: HTMLCanvasElement,
                            detections: DetectionItem[],
                            frameW: number, frameH: number): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const sx = canvas.width / frameW;
  const sy = canvas.height / frameH;
  ctx.lineWidth = 3;
  ctx.font = "bold 18px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  for (const d of detections) {
    const x = d.x * sx;
    const y = d.y * sy;
    const r = (d.diameter / 2) * sx;
    ctx.strokeStyle = "#27c24c";
    ctx.beginPath();
    ctx.arc(x, y, r, 0, Math.PI * 2);
    ctx.stroke();
    ctx.fillStyle = "#27c24c";
    ctx.fillText(`${d.ordinal}:${d.answer}`, x, y - r - 12);
  }
}
