typedef int myint;
int main() { }
