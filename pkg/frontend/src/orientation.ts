/**
 * Device-orientation → tilt mapping.
 *
 * Engine sign convention (what the service expects in `tilt` frames):
 *   pitch_deg > 0  ⇔ top edge tipped away from the user (downhill),
 *   roll_deg  > 0  ⇔ right edge tipped down;  both clamped to ±90°.
 *
 * W3C DeviceOrientationEvent, device held in its natural (portrait)
 * orientation, flat on its back = (beta 0, gamma 0):
 *   beta  > 0 ⇔ top edge tips UP toward the user  (so pitch = −beta),
 *   gamma > 0 ⇔ right edge tips DOWN              (so roll  = +gamma).
 *
 * Platform notes (the reason this mapping is explicit, not guessed):
 * - iOS Safari and Chrome on Android agree on beta/gamma signs for the
 *   near-flat bubble-level regime used here, but iOS requires
 *   `DeviceOrientationEvent.requestPermission()` from a user gesture
 *   (handled in app.ts) while Android fires immediately.
 * - Raw accelerometer (`devicemotion`) values differ in SIGN between iOS
 *   (specific force) and Android (reaction force); this app therefore sends
 *   `tilt` frames computed from deviceorientation instead of raw `accel`
 *   frames, sidestepping that divergence entirely.
 * - gamma flips between ±90° when the device passes vertical; the clamp
 *   plus the near-flat use case keep that discontinuity out of range.
 * - When the screen is software-rotated (landscape), beta/gamma stay in the
 *   DEVICE frame; `screenAngleDeg` (from `screen.orientation.angle`) maps
 *   them into the frame the user is actually holding, per the table below.
 */

export interface Tilt {
  pitchDeg: number;
  rollDeg: number;
}

export const ANGLE_LIMIT_DEG = 90;

export function clampAngle(deg: number): number {
  if (deg === 0) return 0; // fold IEEE −0 (e.g. from −beta at beta 0) into +0
  return Math.min(ANGLE_LIMIT_DEG, Math.max(-ANGLE_LIMIT_DEG, deg));
}

/**
 * Map DeviceOrientationEvent angles (device frame) to engine tilt in the
 * user's frame for the given screen rotation angle (0/90/180/270).
 *
 * screenAngle 90 means content rotated 90° CCW to compensate a clockwise
 * physical rotation: the user's top edge is then the device's LEFT edge and
 * the user's right edge is the device's TOP edge — hence the swaps.
 */
export function orientationToTilt(
  betaDeg: number,
  gammaDeg: number,
  screenAngleDeg = 0,
): Tilt {
  if (!Number.isFinite(betaDeg) || !Number.isFinite(gammaDeg)) {
    throw new Error(`orientation angles must be finite, got (${betaDeg}, ${gammaDeg})`);
  }
  const devicePitch = -betaDeg; // device top edge down (away) = positive
  const deviceRoll = gammaDeg;  // device right edge down = positive

  let pitch: number;
  let roll: number;
  switch (((screenAngleDeg % 360) + 360) % 360) {
    case 0:
      pitch = devicePitch;
      roll = deviceRoll;
      break;
    case 90: // user-top = device left edge, user-right = device top edge
      pitch = -deviceRoll;
      roll = devicePitch;
      break;
    case 180: // upside down: both axes invert
      pitch = -devicePitch;
      roll = -deviceRoll;
      break;
    case 270: // user-top = device right edge, user-right = device bottom edge
      pitch = deviceRoll;
      roll = -devicePitch;
      break;
    default:
      throw new Error(`unsupported screen angle ${screenAngleDeg}`);
  }
  return { pitchDeg: clampAngle(pitch), rollDeg: clampAngle(roll) };
}
