// Session-view fixtures mirroring the service's Liverpool scenario.

import type { MentionView, SessionView } from '../src/types.js';

export function liverpoolMention(): MentionView {
  return {
    mention_id: 'd2-m0',
    start: 0,
    end: 9,
    surface: 'Liverpool',
    phase: 'Linked',
    selected_types: [],
    final_label: null,
    final_entity: null,
    predicted: 'QCITY',
    candidates: [
      { entity: 'QCITY', score: 0.7, name: 'Liverpool',
        description: 'City in north-west England.' },
      { entity: 'QCLUB', score: 0.3, name: 'Liverpool F.C.',
        description: 'Professional football club based in Liverpool, England.' },
    ],
    offered_types: [
      { path: '/group', definition: 'a gathered collection' },
      { path: '/location', definition: 'a particular place' },
      { path: '/location/city', definition: 'a large town' },
      { path: '/organization', definition: 'a group of people with a particular purpose' },
      { path: '/organization/club', definition: 'an association dedicated to a particular interest' },
    ],
  };
}

export function liverpoolView(): SessionView {
  return {
    session_id: 's-test',
    annotator: 'alice',
    doc_id: 'd2',
    text: 'Liverpool won the match yesterday.',
    undo_depth: 0,
    redo_depth: 0,
    mentions: [liverpoolMention()],
  };
}

export function labeledView(): SessionView {
  const view = liverpoolView();
  const mention = view.mentions[0];
  mention.phase = 'Labeled';
  mention.final_label = '/organization/club';
  mention.final_entity = 'QCLUB';
  mention.selected_types = ['/organization'];
  mention.candidates = [mention.candidates[1]];
  mention.predicted = 'QCLUB';
  view.undo_depth = 3;
  return view;
}
