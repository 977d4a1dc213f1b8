void f(int x) {
 // P(x) {x#init>=x}
 x--;
 // P(x) {x#init>x}
}
int main() { f(4); }
