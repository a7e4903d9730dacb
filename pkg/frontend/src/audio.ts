/** Media playback behind a one-method interface so tests can observe it. */

export interface AudioPlayer {
  play(url: string): Promise<void>;
}

export class HtmlAudioPlayer implements AudioPlayer {
  private element: HTMLAudioElement | null = null;

  async play(url: string): Promise<void> {
    if (this.element === null) {
      this.element = new Audio();
    }
    this.element.src = url;
    await this.element.play();
  }
}
